#include "symflow/rectangle.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace symflow::hyp {

namespace {

constexpr double kBisectTol = 1e-12;
constexpr int kBisectMax = 200;

double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo) {
    for (int i = 0; i < kBisectMax && hi - lo > kBisectTol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (f_lo > 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

bool Arc::overlaps(const Arc& other) const {
    return contains(other.start) || other.contains(start);
}

bool crosses_balls(const Geodesic& c, double tau, double xi_minus, double xi_plus) {
    const Geodesic eta(xi_minus, xi_plus, 0.0);
    return eta.distance_to(c.point(-tau)) < 1.0 && eta.distance_to(c.point(tau)) < 1.0;
}

Rectangle make_rectangle(const Geodesic& c, double tau, Arc u_minus, Arc u_plus, int grid) {
    if (tau < 10) throw Error("rectangle: scale tau must be at least 10");
    if (u_minus.overlaps(u_plus))
        throw Error("rectangle: boundary arcs must be disjoint");
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            const double xm = u_minus.sample(static_cast<double>(i) / grid);
            const double xp = u_plus.sample(static_cast<double>(j) / grid);
            if (!crosses_balls(c, tau, xm, xp))
                throw NotInPartialError("rectangle: endpoint pair (" + std::to_string(xm) + ", " +
                                        std::to_string(xp) + ") misses a defining ball");
        }
    }
    return Rectangle{c, tau, u_minus, u_plus};
}

double max_symmetric_half_width(const Geodesic& c, double tau, int grid, double rel_tol) {
    const auto valid = [&](double delta) {
        const Arc um = Arc::around(c.backward_angle(), delta);
        const Arc up = Arc::around(c.forward_angle(), delta);
        if (um.overlaps(up)) return false;
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; j <= grid; ++j)
                if (!crosses_balls(c, tau, um.sample(static_cast<double>(i) / grid),
                                   up.sample(static_cast<double>(j) / grid)))
                    return false;
        return true;
    };
    double lo = 1e-9;
    if (!valid(lo)) throw NotInPartialError("max_symmetric_half_width: no valid width found");
    double hi = lo;
    while (valid(hi * 2) && hi < kPi / 2) hi *= 2;
    hi *= 2;
    while (hi - lo > rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (valid(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

Rectangle max_symmetric_rectangle(const Geodesic& c, double tau, int grid) {
    const double delta = max_symmetric_half_width(c, tau, grid);
    return make_rectangle(c, tau, Arc::around(c.backward_angle(), delta),
                          Arc::around(c.forward_angle(), delta), grid);
}

Geodesic rect_geodesic(const Rectangle& r, double xi_minus, double xi_plus) {
    if (!r.u_minus.contains(xi_minus) || !r.u_plus.contains(xi_plus))
        throw Error("rect_geodesic: endpoints outside the boundary arcs");
    const Geodesic eta0(xi_minus, xi_plus, 0.0);
    const double t1 = eta0.closest_time(r.center.point(-r.tau));
    const double t2 = eta0.closest_time(r.center.point(r.tau));
    const auto f = [&](double t) { return busemann(r.center, eta0.point(t)); };
    const double f1 = f(t1);
    const double f2 = f(t2);
    if (!(f1 > 0 && f2 < 0))
        throw Error("rect_geodesic: Busemann values do not bracket a root");
    const double root = bisect(f, t1, t2, f1);
    return Geodesic(xi_minus, xi_plus, root);
}

std::optional<std::pair<double, double>> ball_interval(const Geodesic& eta, Complex center,
                                                       double radius) {
    const double d_min = eta.distance_to(center);
    if (d_min >= radius) return std::nullopt;
    const double foot = eta.closest_time(center);
    const double half = std::acosh(std::cosh(radius) / std::cosh(d_min));
    return std::make_pair(foot - half, foot + half);
}

bool rect_contains(const Rectangle& r, const Geodesic& eta, double tol) {
    if (!r.u_minus.contains(eta.backward_angle()) || !r.u_plus.contains(eta.forward_angle()))
        return false;
    return std::abs(busemann(r.center, eta.point(0))) <= tol;
}

Geodesic proj_rect(const Rectangle& r, const Geodesic& x, double alpha) {
    if (!r.u_minus.contains(x.backward_angle()) || !r.u_plus.contains(x.forward_angle()))
        throw NotInFlowBoxError("proj_rect: endpoints outside the rectangle arcs");
    const auto f = [&](double u) { return busemann(r.center, x.point(u)); };
    const double f_lo = f(-alpha);
    const double f_hi = f(alpha);
    if (!(f_lo > 0 && f_hi < 0))
        throw NotInFlowBoxError("proj_rect: point is not within the alpha flow box");
    const double root = bisect(f, -alpha, alpha, f_lo);
    return x.shifted(root);
}

double return_time(const Rectangle& r, const Rectangle& r_next, const Geodesic& eta, double alpha) {
    if (!rect_contains(r, eta, 1e-8))
        throw PreconditionError("return_time: the geodesic does not lie in the source rectangle");
    if (!r_next.u_minus.contains(eta.backward_angle()) ||
        !r_next.u_plus.contains(eta.forward_angle()))
        throw NoReturnError("return_time: endpoints leave the partner rectangle");
    const auto f = [&](double t) { return busemann(r_next.center, eta.point(t)); };
    const double f_lo = f(-alpha);
    const double f_hi = f(alpha);
    if (!(f_lo > 0 && f_hi < 0)) throw NoReturnError("return_time: no synchronization within alpha");
    return bisect(f, -alpha, alpha, f_lo);
}

} // namespace symflow::hyp
