#include "symflow/geodesic.hpp"

#include <algorithm>
#include <cmath>

namespace symflow::hyp {

double canonical_angle(double a) {
    double r = std::fmod(a, 2 * kPi);
    if (r < 0) r += 2 * kPi;
    return r;
}

double hyp_dist(Complex p, Complex q) {
    if (std::abs(p) >= 1.0 || std::abs(q) >= 1.0)
        throw OutsideDiskError("hyp_dist: points must lie inside the unit disk");
    const double m = std::abs((p - q) / (1.0 - std::conj(q) * p));
    return 2.0 * std::atanh(m);
}

Geodesic::Geodesic(double backward_angle, double forward_angle, double offset)
    : theta_minus_(canonical_angle(backward_angle)), theta_plus_(canonical_angle(forward_angle)),
      offset_(offset) {
    const Complex a = std::polar(1.0, theta_minus_);
    const Complex b = std::polar(1.0, theta_plus_);
    if (std::abs(a - b) < 1e-12)
        throw DegenerateEndpointsError("geodesic endpoints must be distinct");
    gamma_ = 0.5 * (theta_minus_ + theta_plus_);
    const double omega = 0.5 * (theta_minus_ - theta_plus_); // in (-pi, pi)
    // the orthocircle through e^{+-i w} crosses the real axis at tan(pi/4 - w/2)
    x0_ = std::tan(kPi / 4 - std::abs(omega) / 2);
    // direction: image of the forward endpoint under z -> (z - x0)/(1 - x0 z)
    const Complex bp = std::polar(1.0, theta_plus_ - gamma_);
    Complex d = (bp - x0_) / (1.0 - x0_ * bp);
    dir_ = d / std::abs(d);
}

Complex Geodesic::backward_endpoint() const { return std::polar(1.0, theta_minus_); }
Complex Geodesic::forward_endpoint() const { return std::polar(1.0, theta_plus_); }

Complex Geodesic::point(double t) const {
    const double s = offset_ + t;
    const Complex w = std::tanh(s / 2) * dir_;
    const Complex z = (w + x0_) / (1.0 + x0_ * w);
    return std::polar(1.0, gamma_) * z;
}

double Geodesic::closest_time(Complex p) const {
    // move p into the frame where the geodesic is the real diameter
    const Complex ph = p * std::polar(1.0, -gamma_);
    const Complex w = (ph - x0_) / (1.0 - x0_ * ph);
    const Complex u = w * std::conj(dir_);
    const double a = u.real();
    const double r2 = std::norm(u);
    double x;
    if (std::abs(a) < 1e-9) {
        x = a / (1.0 + r2); // series limit of the quadratic root
    } else {
        const double s = 1.0 + r2;
        x = (s - std::sqrt(s * s - 4 * a * a)) / (2 * a);
    }
    return 2.0 * std::atanh(x) - offset_;
}

double Geodesic::distance_to(Complex p) const {
    const Complex ph = p * std::polar(1.0, -gamma_);
    const Complex w = (ph - x0_) / (1.0 - x0_ * ph);
    const Complex u = w * std::conj(dir_);
    return std::asinh(2 * std::abs(u.imag()) / (1.0 - std::norm(u)));
}

double busemann(const Geodesic& c, Complex q) {
    if (std::abs(q) >= 1.0) throw OutsideDiskError("busemann: point outside the disk");
    const Complex xi = c.forward_endpoint();
    const auto centered = [&](Complex z) {
        return std::log(std::norm(xi - z) / (1.0 - std::norm(z)));
    };
    return centered(q) - centered(c.basepoint());
}

namespace {

// composite adaptive Simpson with absolute tolerance
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

FlowDistanceResult flow_distance_full(const Geodesic& a, const Geodesic& b,
                                      const FlowDistanceOptions& opts) {
    const double d0 = hyp_dist(a.point(0), b.point(0));
    // choose S so the certified tail (d(s) <= d0 + 2|s|) is below tol/2
    double s_cut = 5;
    for (int i = 0; i < 6; ++i)
        s_cut = 0.5 * std::log(std::max((d0 + 2 * s_cut + 1) / (opts.tol / 2), 2.0));
    const auto integrand = [&](double s) {
        return hyp_dist(a.point(s), b.point(s)) * std::exp(-2 * std::abs(s));
    };
    const double left = integrate(integrand, -s_cut, 0.0, opts.tol / 8);
    const double right = integrate(integrand, 0.0, s_cut, opts.tol / 8);
    FlowDistanceResult out;
    out.truncation = s_cut;
    out.tail_bound = (d0 + 2 * s_cut + 1) * std::exp(-2 * s_cut);
    out.value = left + right;
    return out;
}

double flow_distance(const Geodesic& a, const Geodesic& b, const FlowDistanceOptions& opts) {
    return flow_distance_full(a, b, opts).value;
}

Geodesic bracket(const Geodesic& c, const Geodesic& c_prime) {
    if (std::abs(std::polar(1.0, c.backward_angle()) - std::polar(1.0, c_prime.forward_angle())) <
        1e-12)
        throw DegenerateEndpointsError("bracket: shared endpoint");
    const Geodesic canonical(c.backward_angle(), c_prime.forward_angle(), 0.0);
    // B_{c'} is affine along any geodesic with the same forward endpoint
    const double v = busemann(c_prime, canonical.point(0));
    return Geodesic(c.backward_angle(), c_prime.forward_angle(), v);
}

double bracket_time(const Geodesic& c, const Geodesic& c_prime) {
    const Geodesic d = bracket(c, c_prime);
    return busemann(c.reversed(), d.point(0));
}

bool is_strong_stable(const Geodesic& c, const Geodesic& c_prime, double delta,
                      const FlowDistanceOptions& opts) {
    if (c.forward_angle() != c_prime.forward_angle()) return false;
    if (std::abs(busemann(c, c_prime.point(0))) > 1e-10) return false;
    return flow_distance(c, c_prime, opts) < delta;
}

bool is_strong_unstable(const Geodesic& c, const Geodesic& c_prime, double delta,
                        const FlowDistanceOptions& opts) {
    if (c.backward_angle() != c_prime.backward_angle()) return false;
    if (std::abs(busemann(c.reversed(), c_prime.point(0))) > 1e-10) return false;
    return flow_distance(c, c_prime, opts) < delta;
}

} // namespace symflow::hyp
