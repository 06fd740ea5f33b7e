#include "symflow/suspension.hpp"

#include <algorithm>
#include <cmath>

namespace symflow::susp {

namespace {

constexpr double kEntropyTol = 1e-10;
constexpr std::uint64_t kEnumerationBudget = 200000000;

} // namespace

RoofFunction::RoofFunction(const TransitionMatrix& matrix, LocallyConstantPotential values)
    : values_(matrix, values.depth(), values.table()), min_(HUGE_VAL) {
    for (const auto& [w, v] : values_.table()) {
        if (!(v > 0)) throw Error("roof function must be strictly positive");
        min_ = std::min(min_, v);
    }
}

RoofFunction RoofFunction::constant(const TransitionMatrix& matrix, double value) {
    std::map<Word, double> table;
    for (const Word& w : matrix.words(1)) table[w] = value;
    return RoofFunction(matrix, LocallyConstantPotential(matrix, 1, std::move(table)));
}

bool RoofFunction::is_constant(double* value) const {
    const double first = values_.table().begin()->second;
    for (const auto& [w, v] : values_.table())
        if (v != first) return false;
    if (value) *value = first;
    return true;
}

SuspensionFlow::SuspensionFlow(TransitionMatrix base_matrix, RoofFunction roof_function)
    : base(std::move(base_matrix)), roof(std::move(roof_function)) {}

namespace {

// Roof value at the point's cursor; throws when a finite window cannot
// provide the whole depth-k look-ahead.
double roof_at(const SuspensionFlow& flow, const FlowPoint& p, int cursor) {
    const int depth = flow.roof.depth();
    const int n = static_cast<int>(p.symbols.size());
    Word window(depth, 0);
    for (int j = 0; j < depth; ++j) {
        int idx = cursor + j;
        if (p.periodic) {
            idx = ((idx % n) + n) % n;
        } else if (idx < 0 || idx >= n) {
            throw WindowExhaustedError("flow point window exhausted");
        }
        window[j] = p.symbols[idx];
    }
    return flow.roof(window);
}

int wrap_cursor(const FlowPoint& p, int cursor) {
    if (!p.periodic) return cursor;
    const int n = static_cast<int>(p.symbols.size());
    return ((cursor % n) + n) % n;
}

} // namespace

FlowPoint periodic_point(const SuspensionFlow& flow, const sft::PeriodicOrbit& orbit, int phase,
                         double height) {
    if (!flow.base.cyclically_admissible(orbit.word))
        throw InadmissibleWordError("periodic_point: orbit not admissible for this base");
    FlowPoint p;
    p.periodic = true;
    p.symbols = orbit.word;
    p.cursor = wrap_cursor(p, phase);
    p.height = 0;
    return evolve(flow, p, height);
}

FlowPoint window_point(const SuspensionFlow& flow, Word window, int cursor, double height) {
    if (!flow.base.admissible(window)) throw InadmissibleWordError("window_point: window not admissible");
    if (cursor < 0 || cursor >= static_cast<int>(window.size()))
        throw Error("window_point: cursor outside the window");
    FlowPoint p;
    p.periodic = false;
    p.symbols = std::move(window);
    p.cursor = cursor;
    p.height = 0;
    return evolve(flow, p, height);
}

FlowPoint evolve(const SuspensionFlow& flow, FlowPoint point, double time) {
    double total = point.height + time;
    int cursor = point.cursor;
    if (total >= 0) {
        while (true) {
            const double r = roof_at(flow, point, cursor);
            if (total < r) break;
            total -= r;
            cursor = wrap_cursor(point, cursor + 1);
            if (!point.periodic && cursor >= static_cast<int>(point.symbols.size()))
                throw WindowExhaustedError("evolve: window exhausted forward");
        }
    } else {
        while (total < 0) {
            cursor = wrap_cursor(point, cursor - 1);
            if (!point.periodic && cursor < 0)
                throw WindowExhaustedError("evolve: window exhausted backward");
            total += roof_at(flow, point, cursor);
        }
    }
    point.cursor = cursor;
    point.height = total;
    return point;
}

double orbit_period(const SuspensionFlow& flow, const sft::PeriodicOrbit& orbit) {
    if (!flow.base.cyclically_admissible(orbit.word))
        throw InadmissibleWordError("orbit_period: orbit not admissible for this base");
    return thermo::birkhoff_sum_cyclic(flow.roof.potential(), orbit.word);
}

std::vector<std::pair<sft::PeriodicOrbit, double>> primitive_orbits_up_to(const SuspensionFlow& flow,
                                                                          double l_max) {
    if (!(l_max > 0)) throw Error("primitive_orbits_up_to: l_max must be positive");
    const int n_max = static_cast<int>(std::floor(l_max / flow.roof.min_value() + 1e-12));
    std::vector<std::pair<sft::PeriodicOrbit, double>> out;
    std::uint64_t nodes = 0;
    Word current;
    const double rho_min = flow.roof.min_value();
    auto dfs = [&](auto&& self) -> void {
        const int len = static_cast<int>(current.size());
        if (len >= 1) {
            if (++nodes > kEnumerationBudget)
                throw Error("primitive_orbits_up_to: enumeration budget exhausted; reduce l_max");
            if (flow.base.allows(current.back(), current.front()) && sft::is_primitive(current) &&
                current == sft::canonical_rotation(current)) {
                const double period = thermo::birkhoff_sum_cyclic(flow.roof.potential(), current);
                if (period <= l_max + 1e-12)
                    out.emplace_back(sft::PeriodicOrbit(flow.base, current), period);
            }
        }
        if (len == n_max) return;
        // prune on the guaranteed-minimum period of any completion
        if (len * rho_min > l_max + 1e-12) return;
        if (len == 0) {
            for (sft::Symbol s = 0; s < flow.base.size(); ++s) {
                current.push_back(s);
                self(self);
                current.pop_back();
            }
        } else {
            for (const sft::Symbol s : flow.base.successors(current.back())) {
                current.push_back(s);
                self(self);
                current.pop_back();
            }
        }
    };
    dfs(dfs);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first.word < b.first.word;
    });
    return out;
}

double flow_entropy(const SuspensionFlow& flow) {
    const auto minus_s_rho = [&](double s) {
        return thermo::pressure(flow.base, flow.roof.potential().scaled(-s));
    };
    double lo = 0.0;
    const double p0 = minus_s_rho(0.0);
    if (p0 < 0) throw BracketFailureError("flow_entropy: P(0) < 0");
    if (p0 == 0) return 0.0;
    double hi = p0 / flow.roof.min_value() + 1.0;
    const double p_hi = minus_s_rho(hi);
    if (!(p_hi < 0)) throw BracketFailureError("flow_entropy: upper bracket does not change sign");
    const double p_mid = minus_s_rho(hi / 2);
    if (!(p_mid < p0 && p_hi < p_mid))
        throw BracketFailureError("flow_entropy: pressure not decreasing on the bracket");
    while (hi - lo > kEntropyTol / 10) {
        const double mid = 0.5 * (lo + hi);
        if (minus_s_rho(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// trace(A_w^n) for the complex-weighted matrix A_w = A_ij e^{-s rho(edge)},
// computed densely; valid for depth <= 2 roofs after recoding.
std::vector<std::complex<double>> weighted_traces(const SuspensionFlow& flow, std::complex<double> s,
                                                  int n_max) {
    const thermo::EdgeWeightedShift coded = thermo::recode(flow.base, flow.roof.potential());
    const int n = coded.matrix.size();
    std::vector<std::complex<double>> base(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& succ = coded.matrix.successors(i);
        for (std::size_t k = 0; k < succ.size(); ++k)
            base[static_cast<std::size_t>(i) * n + succ[k]] = std::exp(-s * coded.log_weights[i][k]);
    }
    std::vector<std::complex<double>> power = base;
    std::vector<std::complex<double>> traces(n_max + 1, 0.0);
    std::vector<std::complex<double>> next(static_cast<std::size_t>(n) * n);
    for (int step = 1; step <= n_max; ++step) {
        std::complex<double> tr = 0.0;
        for (int i = 0; i < n; ++i) tr += power[static_cast<std::size_t>(i) * n + i];
        traces[step] = tr;
        if (step == n_max) break;
        std::fill(next.begin(), next.end(), std::complex<double>(0.0));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const std::complex<double> a = power[static_cast<std::size_t>(i) * n + k];
                if (a == std::complex<double>(0.0)) continue;
                for (int j = 0; j < n; ++j)
                    next[static_cast<std::size_t>(i) * n + j] += a * base[static_cast<std::size_t>(k) * n + j];
            }
        power.swap(next);
    }
    return traces;
}

// sum over all period-n points with S_n rho <= l_max of e^{-s S_n rho},
// by direct enumeration; used for non-constant roofs.
std::complex<double> constrained_period_sum(const SuspensionFlow& flow, std::complex<double> s, int n,
                                            double l_max, std::uint64_t& nodes) {
    std::complex<double> total = 0.0;
    Word current;
    const double rho_min = flow.roof.min_value();
    auto dfs = [&](auto&& self) -> void {
        const int len = static_cast<int>(current.size());
        if (len == n) {
            if (!flow.base.allows(current.back(), current.front())) return;
            const double period = thermo::birkhoff_sum_cyclic(flow.roof.potential(), current);
            if (period <= l_max + 1e-12) total += std::exp(-s * period);
            return;
        }
        if (++nodes > kEnumerationBudget) throw Error("zeta: enumeration budget exhausted; reduce l_max");
        if (len * rho_min > l_max + 1e-12) return;
        if (len == 0) {
            for (sft::Symbol sym = 0; sym < flow.base.size(); ++sym) {
                current.push_back(sym);
                self(self);
                current.pop_back();
            }
        } else {
            for (const sft::Symbol sym : flow.base.successors(current.back())) {
                current.push_back(sym);
                self(self);
                current.pop_back();
            }
        }
    };
    dfs(dfs);
    return total;
}

double envelope_tail(const SuspensionFlow& flow, double re_s, double l_max, double* q_out) {
    const double lambda = sft::perron(flow.base).value;
    const double q = lambda * std::exp(-re_s * flow.roof.min_value());
    if (q_out) *q_out = q;
    if (q >= 1.0) return HUGE_VAL;
    const int n_cut = static_cast<int>(std::floor(l_max / flow.roof.min_value() + 1e-12));
    // N * sum_{n > n_cut} q^n / n
    double partial = 0;
    double qn = 1;
    for (int n = 1; n <= n_cut; ++n) {
        qn *= q;
        partial += qn / n;
    }
    return flow.base.size() * (-std::log1p(-q) - partial);
}

} // namespace

ZetaResult zeta(const SuspensionFlow& flow, std::complex<double> s, double l_max, const ZetaOptions& opts) {
    if (!(l_max > 0)) throw Error("zeta: l_max must be positive");
    const int n_cut = static_cast<int>(std::floor(l_max / flow.roof.min_value() + 1e-12));

    std::complex<double> log_sum = 0.0;
    double c = 0;
    if (flow.roof.is_constant(&c)) {
        const auto traces = weighted_traces(flow, s, n_cut);
        for (int n = 1; n <= n_cut; ++n) log_sum += traces[n] / static_cast<double>(n);
    } else {
        std::uint64_t nodes = 0;
        for (int n = 1; n <= n_cut; ++n)
            log_sum += constrained_period_sum(flow, s, n, l_max, nodes) / static_cast<double>(n);
    }

    ZetaResult out;
    out.value = std::exp(log_sum);
    double q = 0;
    out.tail_bound = envelope_tail(flow, s.real(), l_max, &q);
    out.converged = q < 1.0 && out.tail_bound <= opts.tail_tolerance;
    return out;
}

std::complex<double> zeta_euler(const SuspensionFlow& flow, std::complex<double> s, double l_max) {
    std::complex<double> log_sum = 0.0;
    double c = 0;
    if (flow.roof.is_constant(&c)) {
        const int p_max = static_cast<int>(std::floor(l_max / c + 1e-12));
        if (p_max > 32) throw Error("zeta_euler: constant-roof cutoff above exact-count range");
        for (int p = 1; p <= p_max; ++p) {
            const double orbits = static_cast<double>(sft::primitive_orbit_count(flow.base, p));
            if (orbits == 0) continue;
            const double period = c * p;
            const int m_max = static_cast<int>(std::floor(l_max / period + 1e-12));
            for (int m = 1; m <= m_max; ++m)
                log_sum += orbits * std::exp(-s * (m * period)) / static_cast<double>(m);
        }
    } else {
        for (const auto& [orbit, period] : primitive_orbits_up_to(flow, l_max)) {
            const int m_max = static_cast<int>(std::floor(l_max / period + 1e-12));
            for (int m = 1; m <= m_max; ++m)
                log_sum += std::exp(-s * (m * period)) / static_cast<double>(m);
        }
    }
    return std::exp(log_sum);
}

double zeta_pole(const SuspensionFlow& flow, double tol) {
    // The series sum_n trace(M(s)^n)/n diverges exactly when the spectral
    // radius of M(s) reaches 1; bisect on that predicate.
    const auto diverges = [&](double sigma) {
        return thermo::pressure(flow.base, flow.roof.potential().scaled(-sigma)) >= 0;
    };
    double lo = 0.0;
    if (!diverges(lo)) return 0.0;
    double hi = sft::perron(flow.base).value / flow.roof.min_value() + 1.0;
    if (diverges(hi)) throw BracketFailureError("zeta_pole: no convergent abscissa found");
    while (hi - lo > tol / 10) {
        const double mid = 0.5 * (lo + hi);
        if (diverges(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> weak_mixing_test(std::span<const double> periods, double tol) {
    if (periods.size() < 2) throw Error("weak_mixing_test: need at least two periods");
    if (tol < 0) throw Error("weak_mixing_test: tol must be >= 0");
    for (const double p : periods)
        if (!(p > 0)) throw Error("weak_mixing_test: periods must be positive");

    double scale = 0;
    for (const double p : periods) scale = std::max(scale, p);
    // Remainders of an exact common divisor collapse to float noise; a
    // non-arithmetic period set keeps producing structural remainders all
    // the way down. Running the cascade to the noise floor separates the
    // two cases: only a divisor that survives above tol is reported.
    const double noise_floor = 1e-12 * scale;
    auto pair_gcd = [&](double a, double b) {
        a = std::abs(a);
        b = std::abs(b);
        if (a < b) std::swap(a, b);
        while (b > noise_floor) {
            const double r = std::abs(a - b * std::round(a / b));
            a = b;
            b = r;
        }
        return a;
    };
    double g = periods[0];
    for (std::size_t i = 1; i < periods.size(); ++i) g = pair_gcd(g, periods[i]);

    const auto verified = [&](double c) {
        if (!(c > tol)) return false;
        for (const double p : periods) {
            const double m = std::round(p / c);
            if (m < 1 || std::abs(p - m * c) > tol) return false;
        }
        return true;
    };

    if (!verified(g)) return std::nullopt;
    // least-squares refinement of the divisor given the integer multipliers
    double num = 0, den = 0;
    for (const double p : periods) {
        const double m = std::round(p / g);
        num += m * p;
        den += m * m;
    }
    const double refined = num / den;
    return verified(refined) ? refined : g;
}

double FlowMeasure::cell_mass(const Word& w, double a, double b) const {
    if (static_cast<int>(w.size()) < roof_values.depth())
        throw WordTooShortError("cell_mass: word does not determine the roof");
    const double roof = roof_values(Word(w.begin(), w.begin() + roof_values.depth()));
    if (!(0 <= a && a <= b && b <= roof + 1e-12))
        throw Error("cell_mass: interval outside [0, roof]");
    return thermo::cylinder_measure(base, w) * (b - a) / roof_integral;
}

FlowMeasure flow_measure(const SuspensionFlow& flow, const LocallyConstantPotential& phi_base) {
    thermo::MarkovMeasure mu = thermo::equilibrium(flow.base, phi_base);
    double z = 0;
    for (const Word& w : flow.base.words(flow.roof.depth()))
        z += thermo::cylinder_measure(mu, w) * flow.roof(w);
    return FlowMeasure{std::move(mu), flow.roof.potential(), z};
}

} // namespace symflow::susp
