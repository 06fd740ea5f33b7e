#pragma once

#include <complex>

#include "symflow/errors.hpp"

namespace symflow::hyp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// canonical representative in [0, 2*pi)
double canonical_angle(double a);

// Poincare-disk distance; throws OutsideDisk for |p| >= 1.
double hyp_dist(Complex p, Complex q);

// Unit-speed geodesic in the Poincare disk, parametrized by its boundary
// endpoints and a basepoint parameter along the canonical parametrization
// (canonical time 0 is the point closest to the disk center).
class Geodesic {
  public:
    Geodesic(double backward_angle, double forward_angle, double offset = 0.0);

    double backward_angle() const { return theta_minus_; }
    double forward_angle() const { return theta_plus_; }
    double offset() const { return offset_; }

    Complex backward_endpoint() const;
    Complex forward_endpoint() const;

    Complex point(double t) const; // c(t), unit speed
    Complex basepoint() const { return point(0.0); }

    Geodesic shifted(double s) const { return Geodesic(theta_minus_, theta_plus_, offset_ + s); }
    Geodesic reversed() const { return Geodesic(theta_plus_, theta_minus_, -offset_); }

    // canonical time of the foot of the perpendicular from p
    double closest_time(Complex p) const;
    double distance_to(Complex p) const;

  private:
    double theta_minus_;
    double theta_plus_;
    double offset_;
    // cached canonical frame: rotation, real translation, boundary direction
    double gamma_ = 0;
    double x0_ = 0;
    Complex dir_{0, 1};
};

// Busemann function determined by c: centered at c(+infty), basepoint c(0).
double busemann(const Geodesic& c, Complex q);

struct FlowDistanceOptions {
    double tol = 1e-8; // certified absolute accuracy (tail + quadrature)
};

struct FlowDistanceResult {
    double value = 0;
    double tail_bound = 0;
    double truncation = 0; // the [-S, S] window used
};

// Distance on the space of geodesics: the integral of the pointwise distance
// against e^{-2|s|}, with a certified truncation tail.
FlowDistanceResult flow_distance_full(const Geodesic& a, const Geodesic& b,
                                      const FlowDistanceOptions& opts = {});
double flow_distance(const Geodesic& a, const Geodesic& b, const FlowDistanceOptions& opts = {});

// Local product bracket: the geodesic from c(-infty) to c'(+infty) based on
// the horocycle B_{c'} = 0. Closed form via the affine Busemann identity.
Geodesic bracket(const Geodesic& c, const Geodesic& c_prime);

// Flow time aligning the unstable leaf: the value v with the bracket lying
// on the unstable horocycle of the time-v flow of c.
double bracket_time(const Geodesic& c, const Geodesic& c_prime);

bool is_strong_stable(const Geodesic& c, const Geodesic& c_prime, double delta,
                      const FlowDistanceOptions& opts = {});
bool is_strong_unstable(const Geodesic& c, const Geodesic& c_prime, double delta,
                        const FlowDistanceOptions& opts = {});

} // namespace symflow::hyp
