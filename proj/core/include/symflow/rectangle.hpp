#pragma once

#include <optional>
#include <utility>

#include "symflow/geodesic.hpp"

namespace symflow::hyp {

// Closed arc of boundary angles, stored as a start angle plus a width.
struct Arc {
    double start = 0; // canonical angle
    double width = 0; // in (0, 2*pi)

    static Arc around(double center, double half_width) {
        return Arc{canonical_angle(center - half_width), 2 * half_width};
    }
    bool contains(double angle) const { return canonical_angle(angle - start) <= width; }
    double sample(double u) const { return canonical_angle(start + u * width); }
    bool overlaps(const Arc& other) const;
};

// Rectangle of geodesics with endpoints in prescribed boundary arcs, based on
// the horocycle of the center geodesic: eta belongs to it when
// eta(-infty) in U-, eta(+infty) in U+ and B_c(eta(0)) = 0.
struct Rectangle {
    Geodesic center;
    double tau = 10;
    Arc u_minus;
    Arc u_plus;
};

// Does the geodesic with these ideal endpoints meet both unit balls around
// c(-tau) and c(+tau)?
bool crosses_balls(const Geodesic& c, double tau, double xi_minus, double xi_plus);

// Validated construction; the arc product is certified against the
// ball-crossing criterion on a (grid+1)^2 sample grid. Throws NotInPartial.
Rectangle make_rectangle(const Geodesic& c, double tau, Arc u_minus, Arc u_plus, int grid = 8);

// Largest certified half-width for symmetric arcs around the endpoints of c,
// found by bisection; the returned value passes the grid check.
double max_symmetric_half_width(const Geodesic& c, double tau, int grid = 8,
                                double rel_tol = 1e-3);
Rectangle max_symmetric_rectangle(const Geodesic& c, double tau, int grid = 8);

// The geodesic of the rectangle with the given endpoints, parametrized so
// that B_c(eta(0)) = 0. Root isolated between the ball crossings; convexity
// of the Busemann function makes it unique.
Geodesic rect_geodesic(const Rectangle& r, double xi_minus, double xi_plus);

// Time interval where eta lies in the ball B(center, radius); absent when
// the geodesic misses the ball.
std::optional<std::pair<double, double>> ball_interval(const Geodesic& eta, Complex center,
                                                       double radius);

bool rect_contains(const Rectangle& r, const Geodesic& eta, double tol = 1e-9);

// Recovers eta from x = g_t(eta) with |t| < alpha. Throws NotInFlowBox.
Geodesic proj_rect(const Rectangle& r, const Geodesic& x, double alpha);

// First synchronization time onto the partner rectangle: the t with
// g_t(eta) in r_next. Throws NoReturn.
double return_time(const Rectangle& r, const Rectangle& r_next, const Geodesic& eta, double alpha);

} // namespace symflow::hyp
