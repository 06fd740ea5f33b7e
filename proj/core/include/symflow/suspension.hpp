#pragma once

#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "symflow/thermo.hpp"

namespace symflow::susp {

using sft::TransitionMatrix;
using sft::Word;
using thermo::LocallyConstantPotential;

// Strictly positive locally constant function; values are return times.
class RoofFunction {
  public:
    RoofFunction(const TransitionMatrix& matrix, LocallyConstantPotential values);

    static RoofFunction constant(const TransitionMatrix& matrix, double value);

    const LocallyConstantPotential& potential() const { return values_; }
    int depth() const { return values_.depth(); }
    double min_value() const { return min_; }
    double operator()(const Word& window) const { return values_(window); }
    // true iff every value equals the first; the common value goes to *value
    bool is_constant(double* value = nullptr) const;

  private:
    LocallyConstantPotential values_;
    double min_;
};

struct SuspensionFlow {
    TransitionMatrix base;
    RoofFunction roof;

    SuspensionFlow(TransitionMatrix base_matrix, RoofFunction roof_function);
};

// A point of the suspension space: a base point (periodic orbit, or a finite
// window that fails loudly when exhausted) plus a height under the roof.
struct FlowPoint {
    bool periodic = false;
    Word symbols;    // orbit word in canonical rotation, or the finite window
    int cursor = 0;  // index of the current symbol
    double height = 0;

    friend bool operator==(const FlowPoint& a, const FlowPoint& b) {
        return a.periodic == b.periodic && a.symbols == b.symbols && a.cursor == b.cursor &&
               a.height == b.height;
    }
};

FlowPoint periodic_point(const SuspensionFlow& flow, const sft::PeriodicOrbit& orbit, int phase,
                         double height);
FlowPoint window_point(const SuspensionFlow& flow, Word window, int cursor, double height);

FlowPoint evolve(const SuspensionFlow& flow, FlowPoint point, double time);

// Cyclic Birkhoff sum of the roof over the orbit.
double orbit_period(const SuspensionFlow& flow, const sft::PeriodicOrbit& orbit);

// Primitive orbits with period <= l_max, sorted by (period, word).
std::vector<std::pair<sft::PeriodicOrbit, double>> primitive_orbits_up_to(const SuspensionFlow& flow,
                                                                          double l_max);

// The unique root of P(-s rho) = 0, by bisection to 1e-10.
double flow_entropy(const SuspensionFlow& flow);

struct ZetaResult {
    std::complex<double> value{1.0, 0.0};
    double tail_bound = 0;  // bound on the missing |log zeta| mass past the cutoff
    bool converged = false;
};

struct ZetaOptions {
    double tail_tolerance = 1e-2; // converged requires tail_bound below this
};

// Truncated dynamical zeta function: exponential of orbit sums over
// repetitions with total period <= l_max.
ZetaResult zeta(const SuspensionFlow& flow, std::complex<double> s, double l_max,
                const ZetaOptions& opts = {});

// Same truncation evaluated through the primitive-orbit (Euler) grouping;
// an independent route used to cross-check zeta().
std::complex<double> zeta_euler(const SuspensionFlow& flow, std::complex<double> s, double l_max);

// Abscissa of convergence of the zeta series (the pole location), bracketed
// by bisection on divergence of the series.
double zeta_pole(const SuspensionFlow& flow, double tol = 1e-6);

// Largest c > tol with every period within tol of an integer multiple of c;
// absent certifies topological weak mixing at resolution tol.
std::optional<double> weak_mixing_test(std::span<const double> periods, double tol = 1e-9);

// Normalized product measure (equilibrium in the base) x Lebesgue / integral
// of the roof.
struct FlowMeasure {
    thermo::MarkovMeasure base;
    LocallyConstantPotential roof_values;
    double roof_integral = 0;

    // mass of the cell [w] x [a, b]; |w| must determine the roof
    double cell_mass(const Word& w, double a, double b) const;
};

FlowMeasure flow_measure(const SuspensionFlow& flow, const LocallyConstantPotential& phi_base);

} // namespace symflow::susp
