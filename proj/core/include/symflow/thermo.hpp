#pragma once

#include <utility>
#include <vector>

#include "symflow/potential.hpp"
#include "symflow/sft.hpp"

namespace symflow::thermo {

// Block recoding of (A, phi) so the transfer operator is a finite matrix:
// states are the admissible (k-1)-words for depth k >= 2 (symbols for k = 1),
// and the potential becomes a log-weight on edges of the block shift.
struct EdgeWeightedShift {
    TransitionMatrix matrix;             // block shift A'
    std::vector<Word> states;            // block word of each state
    int block_length = 1;                // length of the block words
    // log-weight per edge, aligned with matrix.successors(i)
    std::vector<std::vector<double>> log_weights;

    sft::SparseMatrix transfer() const;  // entries e^{log_weight}
    int state_of(const Word& block) const; // -1 if absent
};

EdgeWeightedShift recode(const TransitionMatrix& matrix, const LocallyConstantPotential& phi);

// Topological pressure P(phi) = log of the dominant eigenvalue of the
// weighted transfer matrix.
double pressure(const TransitionMatrix& matrix, const LocallyConstantPotential& phi);

// Gibbs/Parry-type Markov measure built from the Perron eigendata of the
// transfer matrix: P_ij = L_ij r_j / (lambda r_i), p_i = l_i r_i.
struct MarkovMeasure {
    TransitionMatrix support;            // block shift
    std::vector<Word> states;            // block words
    int block_length = 1;
    std::vector<double> stationary;      // p, strictly positive, sums to 1
    std::vector<std::vector<std::pair<int, double>>> transitions; // row-sparse P

    double transition_probability(int i, int j) const;
};

MarkovMeasure equilibrium(const TransitionMatrix& matrix, const LocallyConstantPotential& phi);

// Measure of the cylinder [w] for a word over the original symbols.
double cylinder_measure(const MarkovMeasure& mu, const Word& w);

struct GibbsPerLength {
    int n = 0;
    double lo = 0;            // min ratio among words of length n
    double hi = 0;            // max ratio among words of length n
    double cumulative_ratio = 0; // (max over lengths <= n) / (min over lengths <= n)
};

struct GibbsReport {
    double c_low = 0;  // min over all scanned words of mu[w] / exp(-nP + S_n phi)
    double c_high = 0; // max
    std::vector<GibbsPerLength> per_length;
};

// Scans all admissible words of length n in [depth(phi), n_max]; n_max <= 14.
GibbsReport verify_gibbs(const TransitionMatrix& matrix, const LocallyConstantPotential& phi, int n_max);

struct PressureDerivative {
    double slope = 0;    // centered finite difference of t -> P(phi + t psi), step 1e-5
    double integral = 0; // integral of psi against the equilibrium measure of phi
};

PressureDerivative pressure_derivative(const TransitionMatrix& matrix, const LocallyConstantPotential& phi,
                                       const LocallyConstantPotential& psi);

// Second centered finite difference of t -> P(phi + t psi) at 0, step 1e-4,
// with psi centered to zero mean internally.
double variance(const TransitionMatrix& matrix, const LocallyConstantPotential& phi,
                const LocallyConstantPotential& psi);

} // namespace symflow::thermo
