#include "symflow/sft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <queue>

namespace symflow::sft {

namespace {

using U64Matrix = std::vector<std::vector<std::uint64_t>>;

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in matrix power");
    return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in matrix power");
    return r;
}

U64Matrix identity_u64(int n) {
    U64Matrix m(n, std::vector<std::uint64_t>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

U64Matrix to_u64(const TransitionMatrix& a) {
    const int n = a.size();
    U64Matrix m(n, std::vector<std::uint64_t>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = a.allows(i, j) ? 1 : 0;
    return m;
}

U64Matrix mul(const U64Matrix& a, const U64Matrix& b) {
    const int n = static_cast<int>(a.size());
    U64Matrix c(n, std::vector<std::uint64_t>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < n; ++j)
                if (b[k][j] != 0) c[i][j] = checked_add(c[i][j], checked_mul(a[i][k], b[k][j]));
        }
    return c;
}

U64Matrix power(const TransitionMatrix& a, int n) {
    U64Matrix result = identity_u64(a.size());
    U64Matrix base = to_u64(a);
    int e = n;
    while (e > 0) {
        if (e & 1) result = mul(result, base);
        e >>= 1;
        if (e > 0) base = mul(base, base);
    }
    return result;
}

std::vector<bool> reachable(const std::vector<std::vector<int>>& adj, int start) {
    std::vector<bool> seen(adj.size(), false);
    std::queue<int> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const int v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                q.push(v);
            }
    }
    return seen;
}

bool strongly_connected(const std::vector<std::vector<int>>& fwd, const std::vector<std::vector<int>>& bwd) {
    const auto f = reachable(fwd, 0);
    const auto b = reachable(bwd, 0);
    for (std::size_t i = 0; i < fwd.size(); ++i)
        if (!f[i] || !b[i]) return false;
    return true;
}

} // namespace

Word canonical_rotation(const Word& w) {
    Word best = w;
    Word rot = w;
    for (std::size_t i = 1; i < w.size(); ++i) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

bool is_primitive(const Word& w) {
    const std::size_t n = w.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool repeats = true;
        for (std::size_t i = p; i < n && repeats; ++i)
            if (w[i] != w[i - p]) repeats = false;
        if (repeats) return false;
    }
    return true;
}

PeriodicOrbit::PeriodicOrbit(const TransitionMatrix& matrix, Word w) {
    if (w.empty()) throw Error("periodic orbit: empty word");
    if (!matrix.cyclically_admissible(w))
        throw InadmissibleWordError("periodic orbit word is not cyclically admissible");
    if (!is_primitive(w)) throw Error("periodic orbit word is not primitive");
    word = canonical_rotation(w);
}

bool is_irreducible(const TransitionMatrix& matrix) {
    const int n = matrix.size();
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (int i = 0; i < n; ++i)
        for (const int j : matrix.successors(i)) {
            fwd[i].push_back(j);
            bwd[j].push_back(i);
        }
    return strongly_connected(fwd, bwd);
}

int period(const TransitionMatrix& matrix) {
    if (!is_irreducible(matrix)) throw NotIrreducibleError("period: matrix is not irreducible");
    const int n = matrix.size();
    // BFS levels from symbol 0; the gcd of d(u)+1-d(v) over edges u->v equals
    // the gcd of all cycle lengths in a strongly connected graph.
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const int v : matrix.successors(u))
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    int g = 0;
    for (int u = 0; u < n; ++u)
        for (const int v : matrix.successors(u)) g = std::gcd(g, std::abs(dist[u] + 1 - dist[v]));
    return g == 0 ? 1 : g;
}

std::uint64_t count_words(const TransitionMatrix& matrix, int n) {
    if (n < 1) throw Error("count_words: n must be >= 1");
    const U64Matrix p = power(matrix, n - 1);
    std::uint64_t total = 0;
    for (const auto& row : p)
        for (const std::uint64_t v : row) total = checked_add(total, v);
    return total;
}

std::uint64_t periodic_point_count(const TransitionMatrix& matrix, int n) {
    if (n < 1) throw Error("periodic_point_count: n must be >= 1");
    if (n > 32) throw Error("periodic_point_count: n > 32 not supported (exact integer powers only)");
    const U64Matrix p = power(matrix, n);
    std::uint64_t trace = 0;
    for (int i = 0; i < matrix.size(); ++i) trace = checked_add(trace, p[i][i]);
    return trace;
}

PeriodicCensus enumerate_periodic(const TransitionMatrix& matrix, int n) {
    if (n < 1) throw Error("enumerate_periodic: n must be >= 1");
    if (n > 32) throw Error("enumerate_periodic: n > 32 not supported");
    PeriodicCensus census;
    std::uint64_t found = 0;
    Word current;
    current.reserve(n);
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            if (!matrix.allows(current.back(), current.front())) return;
            ++found;
            if (is_primitive(current) && current == canonical_rotation(current))
                census.primitive.emplace_back(matrix, current);
            return;
        }
        if (depth == 0) {
            for (Symbol s = 0; s < matrix.size(); ++s) {
                current.push_back(s);
                self(self, 1);
                current.pop_back();
            }
        } else {
            for (const Symbol s : matrix.successors(current.back())) {
                current.push_back(s);
                self(self, depth + 1);
                current.pop_back();
            }
        }
    };
    dfs(dfs, 0);
    census.point_count = found;
    const std::uint64_t trace = periodic_point_count(matrix, n);
    if (trace != found)
        throw Error("enumerate_periodic: census " + std::to_string(found) + " != trace " + std::to_string(trace));
    std::sort(census.primitive.begin(), census.primitive.end());
    return census;
}

std::uint64_t primitive_orbit_count(const TransitionMatrix& matrix, int n) {
    if (n < 1) throw Error("primitive_orbit_count: n must be >= 1");
    auto moebius = [](int m) {
        int mu = 1;
        for (int p = 2; p * p <= m; ++p) {
            if (m % p == 0) {
                m /= p;
                if (m % p == 0) return 0;
                mu = -mu;
            }
        }
        if (m > 1) mu = -mu;
        return mu;
    };
    __int128 total = 0;
    for (int d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        const int mu = moebius(n / d);
        if (mu == 0) continue;
        const __int128 t = static_cast<__int128>(periodic_point_count(matrix, d));
        total += mu > 0 ? t : -t;
    }
    if (total < 0 || total % n != 0) throw Error("primitive_orbit_count: inconsistent Moebius sum");
    return static_cast<std::uint64_t>(total / n);
}

SparseMatrix SparseMatrix::from_transition(const TransitionMatrix& matrix) {
    SparseMatrix m;
    m.n = matrix.size();
    m.rows.resize(m.n);
    for (int i = 0; i < m.n; ++i)
        for (const int j : matrix.successors(i)) m.rows[i].emplace_back(j, 1.0);
    return m;
}

std::vector<double> SparseMatrix::apply(std::span<const double> v) const {
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (const auto& [j, w] : rows[i]) acc += w * v[j];
        out[i] = acc;
    }
    return out;
}

std::vector<double> SparseMatrix::apply_transpose(std::span<const double> v) const {
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, w] : rows[i]) out[j] += w * v[i];
    return out;
}

namespace {

// Power iteration with a diagonal shift. The shift makes the dominant
// eigenvalue strictly separated in modulus even for matrices with period > 1,
// without changing the eigenvectors.
struct OneSided {
    std::vector<double> vec;
    double value = 0;
    double residual = 0;
    std::uint64_t iterations = 0;
};

OneSided power_iterate(const SparseMatrix& m, bool transpose, double shift, const PerronOptions& opts) {
    const int n = m.n;
    std::vector<double> v(n, 1.0 / n);
    double best_residual = HUGE_VAL;
    std::vector<double> best_v = v;
    double best_lambda = 0;
    std::uint64_t since_improvement = 0;
    std::uint64_t iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        std::vector<double> mv = transpose ? m.apply_transpose(v) : m.apply(v);
        double lambda = 0;
        for (const double x : mv) lambda += x;
        double residual = 0;
        for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(mv[i] - lambda * v[i]));
        if (residual < best_residual) {
            best_residual = residual;
            best_v = v;
            best_lambda = lambda;
            since_improvement = 0;
        } else if (++since_improvement > 64) {
            break;
        }
        if (residual <= 1e-3 * opts.tol) break;
        double sum = 0;
        for (int i = 0; i < n; ++i) {
            mv[i] += shift * v[i];
            sum += mv[i];
        }
        if (!(sum > 0)) throw NoConvergenceError("power iteration collapsed (matrix not nonnegative?)");
        for (int i = 0; i < n; ++i) v[i] = mv[i] / sum;
    }
    if (best_residual > opts.tol)
        throw NoConvergenceError("power iteration did not reach residual " + std::to_string(opts.tol));
    OneSided out;
    out.vec = std::move(best_v);
    out.value = best_lambda;
    out.residual = best_residual;
    out.iterations = iter;
    return out;
}

bool pattern_irreducible(const SparseMatrix& m) {
    std::vector<std::vector<int>> fwd(m.n), bwd(m.n);
    for (int i = 0; i < m.n; ++i)
        for (const auto& [j, w] : m.rows[i])
            if (w != 0) {
                fwd[i].push_back(j);
                bwd[j].push_back(i);
            }
    return strongly_connected(fwd, bwd);
}

} // namespace

PerronData perron(const SparseMatrix& m, const PerronOptions& opts) {
    if (m.n < 1) throw Error("perron: empty matrix");
    for (const auto& row : m.rows)
        for (const auto& [j, w] : row)
            if (w < 0) throw Error("perron: matrix must be nonnegative");
    if (opts.require_irreducible && !pattern_irreducible(m))
        throw NotIrreducibleError("perron: matrix is not irreducible");

    double max_row_sum = 0;
    for (const auto& row : m.rows) {
        double s = 0;
        for (const auto& [j, w] : row) s += w;
        max_row_sum = std::max(max_row_sum, s);
    }
    const double shift = std::max(1.0, max_row_sum);

    OneSided right = power_iterate(m, false, shift, opts);
    OneSided left = power_iterate(m, true, shift, opts);

    PerronData out;
    out.right = std::move(right.vec);
    out.left = std::move(left.vec);
    out.iterations = right.iterations + left.iterations;

    double rsum = 0;
    for (const double x : out.right) rsum += x;
    for (double& x : out.right) x /= rsum;
    // Rayleigh quotient with the left eigenvector; second-order accurate.
    const std::vector<double> mr = m.apply(out.right);
    double num = 0, den = 0;
    for (int i = 0; i < m.n; ++i) {
        num += out.left[i] * mr[i];
        den += out.left[i] * out.right[i];
    }
    out.value = num / den;

    // residuals at the sum-normalized scale of each eigenvector
    double resid_r = 0;
    for (int i = 0; i < m.n; ++i) resid_r = std::max(resid_r, std::abs(mr[i] - out.value * out.right[i]));
    const std::vector<double> lm = m.apply_transpose(out.left);
    double resid_l = 0;
    for (int i = 0; i < m.n; ++i) resid_l = std::max(resid_l, std::abs(lm[i] - out.value * out.left[i]));
    out.residual = std::max(resid_r, resid_l);
    if (out.residual > opts.tol) {
        std::ostringstream msg;
        msg << "perron: final residual " << out.residual << " exceeds tolerance " << opts.tol;
        throw NoConvergenceError(msg.str());
    }

    const double lr = den;
    for (double& x : out.left) x /= lr;
    return out;
}

PerronData perron(const TransitionMatrix& matrix, const PerronOptions& opts) {
    return perron(SparseMatrix::from_transition(matrix), opts);
}

SequenceDistance sequence_distance(std::span<const Symbol> x, std::span<const Symbol> y) {
    if (x.size() != y.size()) throw Error("sequence_distance: windows must have equal length");
    if (x.empty() || x.size() % 2 == 0) throw Error("sequence_distance: windows must have odd length");
    const int radius = static_cast<int>(x.size() / 2);
    for (int l = 0; l <= radius; ++l) {
        if (x[radius + l] != y[radius + l] || x[radius - l] != y[radius - l]) {
            SequenceDistance d;
            d.value = std::ldexp(1.0, -l);
            d.resolved = true;
            d.unresolved_bound = d.value;
            return d;
        }
    }
    SequenceDistance d;
    d.value = 0;
    d.resolved = false;
    d.unresolved_bound = std::ldexp(1.0, -(radius + 1));
    return d;
}

} // namespace symflow::sft
