#include "symflow/thermo.hpp"

#include <algorithm>
#include <cmath>

namespace symflow::thermo {

namespace {

constexpr double kDerivativeStep = 1e-5;
constexpr double kVarianceStep = 1e-4;

} // namespace

sft::SparseMatrix EdgeWeightedShift::transfer() const {
    sft::SparseMatrix m;
    m.n = matrix.size();
    m.rows.resize(m.n);
    for (int i = 0; i < m.n; ++i) {
        const auto& succ = matrix.successors(i);
        for (std::size_t a = 0; a < succ.size(); ++a)
            m.rows[i].emplace_back(succ[a], std::exp(log_weights[i][a]));
    }
    return m;
}

int EdgeWeightedShift::state_of(const Word& block) const {
    const auto it = std::lower_bound(states.begin(), states.end(), block);
    if (it == states.end() || *it != block) return -1;
    return static_cast<int>(it - states.begin());
}

EdgeWeightedShift recode(const TransitionMatrix& matrix, const LocallyConstantPotential& phi) {
    const int k = phi.depth();
    const int block = std::max(k - 1, 1);
    EdgeWeightedShift out{matrix, {}, block, {}};

    out.states = matrix.words(block);
    const int n = static_cast<int>(out.states.size());
    std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) {
        const Word& u = out.states[i];
        for (int j = 0; j < n; ++j) {
            const Word& v = out.states[j];
            bool overlap = true;
            for (int t = 0; t + 1 < block && overlap; ++t)
                if (u[t + 1] != v[t]) overlap = false;
            if (overlap && !matrix.allows(u[block - 1], v[block - 1])) overlap = false;
            if (overlap) rows[i][j] = 1;
        }
    }
    out.matrix = TransitionMatrix(rows);

    out.log_weights.resize(n);
    for (int i = 0; i < n; ++i) {
        for (const int j : out.matrix.successors(i)) {
            Word composite = out.states[i];
            composite.push_back(out.states[j][block - 1]);
            const Word window(composite.begin(), composite.begin() + k);
            out.log_weights[i].push_back(phi(window));
        }
    }
    return out;
}

double pressure(const TransitionMatrix& matrix, const LocallyConstantPotential& phi) {
    if (!sft::is_irreducible(matrix)) throw NotIrreducibleError("pressure: matrix is not irreducible");
    const EdgeWeightedShift coded = recode(matrix, phi);
    return std::log(sft::perron(coded.transfer()).value);
}

double MarkovMeasure::transition_probability(int i, int j) const {
    for (const auto& [col, p] : transitions[i])
        if (col == j) return p;
    return 0.0;
}

MarkovMeasure equilibrium(const TransitionMatrix& matrix, const LocallyConstantPotential& phi) {
    if (!sft::is_irreducible(matrix)) throw NotIrreducibleError("equilibrium: matrix is not irreducible");
    const EdgeWeightedShift coded = recode(matrix, phi);
    const sft::SparseMatrix transfer = coded.transfer();
    const sft::PerronData eigen = sft::perron(transfer);

    MarkovMeasure mu{coded.matrix, coded.states, coded.block_length, {}, {}};
    const int n = transfer.n;
    mu.stationary.resize(n);
    for (int i = 0; i < n; ++i) mu.stationary[i] = eigen.left[i] * eigen.right[i];
    double total = 0;
    for (const double p : mu.stationary) total += p;
    for (double& p : mu.stationary) p /= total;

    mu.transitions.resize(n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0;
        for (const auto& [j, w] : transfer.rows[i]) {
            const double p = w * eigen.right[j] / (eigen.value * eigen.right[i]);
            mu.transitions[i].emplace_back(j, p);
            row_sum += p;
        }
        for (auto& [j, p] : mu.transitions[i]) p /= row_sum;
    }

    // stationarity check: p P = p
    std::vector<double> image(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, p] : mu.transitions[i]) image[j] += mu.stationary[i] * p;
    for (int i = 0; i < n; ++i)
        if (std::abs(image[i] - mu.stationary[i]) > 1e-12)
            throw NoConvergenceError("equilibrium: stationary vector residual exceeds 1e-12");
    return mu;
}

double cylinder_measure(const MarkovMeasure& mu, const Word& w) {
    if (w.empty()) throw InadmissibleWordError("cylinder_measure: empty word");
    const int block = mu.block_length;
    const int len = static_cast<int>(w.size());
    auto state_of = [&](const Word& b) {
        const auto it = std::lower_bound(mu.states.begin(), mu.states.end(), b);
        if (it == mu.states.end() || *it != b) return -1;
        return static_cast<int>(it - mu.states.begin());
    };
    if (len < block) {
        double total = 0;
        bool any = false;
        for (std::size_t i = 0; i < mu.states.size(); ++i) {
            if (std::equal(w.begin(), w.end(), mu.states[i].begin())) {
                total += mu.stationary[i];
                any = true;
            }
        }
        if (!any) throw InadmissibleWordError("cylinder_measure: word is not admissible");
        return total;
    }
    Word head(w.begin(), w.begin() + block);
    int state = state_of(head);
    if (state < 0) throw InadmissibleWordError("cylinder_measure: word is not admissible");
    double measure = mu.stationary[state];
    for (int i = 1; i + block <= len; ++i) {
        const Word next_block(w.begin() + i, w.begin() + i + block);
        const int next = state_of(next_block);
        if (next < 0) throw InadmissibleWordError("cylinder_measure: word is not admissible");
        const double p = mu.transition_probability(state, next);
        if (p == 0.0) throw InadmissibleWordError("cylinder_measure: word is not admissible");
        measure *= p;
        state = next;
    }
    return measure;
}

GibbsReport verify_gibbs(const TransitionMatrix& matrix, const LocallyConstantPotential& phi, int n_max) {
    if (n_max > 14) throw Error("verify_gibbs: n_max must be <= 14");
    if (n_max < phi.depth()) throw Error("verify_gibbs: n_max below potential depth");
    const double p = pressure(matrix, phi);
    const MarkovMeasure mu = equilibrium(matrix, phi);

    GibbsReport report;
    double running_lo = HUGE_VAL, running_hi = 0;
    for (int n = phi.depth(); n <= n_max; ++n) {
        GibbsPerLength entry;
        entry.n = n;
        entry.lo = HUGE_VAL;
        entry.hi = 0;
        for (const Word& w : matrix.words(n)) {
            const double ratio = cylinder_measure(mu, w) / std::exp(-n * p + birkhoff_sum(phi, w));
            entry.lo = std::min(entry.lo, ratio);
            entry.hi = std::max(entry.hi, ratio);
        }
        running_lo = std::min(running_lo, entry.lo);
        running_hi = std::max(running_hi, entry.hi);
        entry.cumulative_ratio = running_hi / running_lo;
        report.per_length.push_back(entry);
    }
    report.c_low = running_lo;
    report.c_high = running_hi;
    return report;
}

namespace {

double integral_against(const TransitionMatrix& matrix, const MarkovMeasure& mu,
                        const LocallyConstantPotential& psi) {
    double total = 0;
    for (const Word& w : matrix.words(psi.depth())) total += cylinder_measure(mu, w) * psi(w);
    return total;
}

} // namespace

PressureDerivative pressure_derivative(const TransitionMatrix& matrix, const LocallyConstantPotential& phi,
                                       const LocallyConstantPotential& psi) {
    const double h = kDerivativeStep;
    const double plus = pressure(matrix, combine(matrix, phi, 1.0, psi, h));
    const double minus = pressure(matrix, combine(matrix, phi, 1.0, psi, -h));
    PressureDerivative out;
    out.slope = (plus - minus) / (2 * h);
    out.integral = integral_against(matrix, equilibrium(matrix, phi), psi);
    return out;
}

double variance(const TransitionMatrix& matrix, const LocallyConstantPotential& phi,
                const LocallyConstantPotential& psi) {
    const double mean = integral_against(matrix, equilibrium(matrix, phi), psi);
    std::map<Word, double> centered_table = psi.table();
    for (auto& [w, v] : centered_table) v -= mean;
    const LocallyConstantPotential centered(matrix, psi.depth(), std::move(centered_table));

    const double h = kVarianceStep;
    const double plus = pressure(matrix, combine(matrix, phi, 1.0, centered, h));
    const double mid = pressure(matrix, phi);
    const double minus = pressure(matrix, combine(matrix, phi, 1.0, centered, -h));
    return (plus - 2 * mid + minus) / (h * h);
}

} // namespace symflow::thermo
