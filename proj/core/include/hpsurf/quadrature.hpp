// Contours in the complex plane and adaptive Gauss-Legendre quadrature.
//
// A Contour is a list of parametrized segments (straight lines and circular
// arcs).  The integrator subdivides each segment recursively, comparing a
// whole-panel Gauss rule against its two halves, until the requested
// absolute tolerance is met.  Node/weight tables are computed at the current
// working precision by Newton iteration on the Legendre recurrence and
// cached per (order, precision).
#pragma once

#include "hpsurf/numerics.hpp"

#include <functional>
#include <vector>

namespace hpsurf {

struct Segment {
    enum Kind { Line, Arc } kind = Line;
    // Line: z(t) = a + t (b - a), t in [0,1]
    Cplx a, b;
    // Arc: z(t) = center + radius * exp(i (theta0 + t (theta1 - theta0)))
    Cplx center;
    Real radius = 0, theta0 = 0, theta1 = 0;

    Cplx point(const Real& t) const;
    Cplx derivative(const Real& t) const;  // dz/dt
    Real length_estimate() const;

    static Segment line(const Cplx& from, const Cplx& to);
    static Segment arc(const Cplx& center, const Real& radius, const Real& th0, const Real& th1);
};

struct Contour {
    std::vector<Segment> segments;

    Contour& add_line(const Cplx& from, const Cplx& to);
    Contour& add_arc(const Cplx& center, const Real& radius, const Real& th0, const Real& th1);
    // full circle, counter-clockwise, starting at angle th0
    Contour& add_circle(const Cplx& center, const Real& radius, const Real& th0 = Real(0));
    Cplx start() const;
    Cplx end() const;
    bool closed(const Real& tol) const;

    static Contour segment(const Cplx& from, const Cplx& to);
    static Contour circle(const Cplx& center, const Real& radius);
    static Contour rectangle(const Cplx& lo, const Cplx& hi);  // ccw, corners lo..hi
};

// Gauss-Legendre nodes and weights on [-1, 1] at the current precision.
void gauss_legendre(int order, std::vector<Real>& nodes, std::vector<Real>& weights);

using CFunc = std::function<Cplx(const Cplx&)>;

// \int_contour f(z) dz with absolute tolerance `tol`.
Cplx integrate(const CFunc& f, const Contour& contour, const Real& tol,
               int order = 20, int max_depth = 40);

Cplx integrate_segment(const CFunc& f, const Segment& seg, const Real& tol,
                       int order = 20, int max_depth = 40);

}  // namespace hpsurf
