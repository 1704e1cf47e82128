#include "hpsurf/quadrature.hpp"
#include <algorithm>

#include <map>
#include <stdexcept>
#include <utility>

namespace hpsurf {

using boost::multiprecision::abs;
using boost::multiprecision::cos;

Cplx Segment::point(const Real& t) const {
    if (kind == Line) return a + Cplx(t) * (b - a);
    return center + polar(radius, theta0 + t * (theta1 - theta0));
}

Cplx Segment::derivative(const Real& t) const {
    if (kind == Line) return b - a;
    // d/dt [c + r e^{i th(t)}] = i th'(t) r e^{i th(t)}
    Cplx z = polar(radius, theta0 + t * (theta1 - theta0));
    return i_times(z) * Cplx(theta1 - theta0);
}

Real Segment::length_estimate() const {
    if (kind == Line) return abs(b - a);
    return radius * abs(theta1 - theta0);
}

Segment Segment::line(const Cplx& from, const Cplx& to) {
    Segment s;
    s.kind = Line;
    s.a = from;
    s.b = to;
    return s;
}

Segment Segment::arc(const Cplx& center, const Real& radius, const Real& th0, const Real& th1) {
    Segment s;
    s.kind = Arc;
    s.center = center;
    s.radius = radius;
    s.theta0 = th0;
    s.theta1 = th1;
    return s;
}

Contour& Contour::add_line(const Cplx& from, const Cplx& to) {
    segments.push_back(Segment::line(from, to));
    return *this;
}

Contour& Contour::add_arc(const Cplx& center, const Real& radius, const Real& th0, const Real& th1) {
    segments.push_back(Segment::arc(center, radius, th0, th1));
    return *this;
}

Contour& Contour::add_circle(const Cplx& center, const Real& radius, const Real& th0) {
    Real two_pi = 2 * pi_value();
    return add_arc(center, radius, th0, th0 + two_pi);
}

Cplx Contour::start() const {
    if (segments.empty()) throw std::runtime_error("empty contour");
    return segments.front().point(Real(0));
}

Cplx Contour::end() const {
    if (segments.empty()) throw std::runtime_error("empty contour");
    return segments.back().point(Real(1));
}

bool Contour::closed(const Real& tol) const { return abs(end() - start()) <= tol; }

Contour Contour::segment(const Cplx& from, const Cplx& to) {
    Contour c;
    c.add_line(from, to);
    return c;
}

Contour Contour::circle(const Cplx& center, const Real& radius) {
    Contour c;
    c.add_circle(center, radius);
    return c;
}

Contour Contour::rectangle(const Cplx& lo, const Cplx& hi) {
    Contour c;
    Cplx bl = lo, br(hi.re, lo.im), tr = hi, tl(lo.re, hi.im);
    c.add_line(bl, br).add_line(br, tr).add_line(tr, tl).add_line(tl, bl);
    return c;
}

namespace {

// node/weight cache keyed by (order, decimal digits)
std::map<std::pair<int, unsigned>, std::pair<std::vector<Real>, std::vector<Real>>> g_gl_cache;

void legendre_eval(int n, const Real& x, Real& p, Real& dp) {
    // three-term recurrence for P_n and its derivative
    Real p0(1), p1 = x;
    for (int k = 2; k <= n; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = (n == 0) ? p0 : p1;
    if (n == 0) {
        dp = 0;
        return;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
}

}  // namespace

void gauss_legendre(int order, std::vector<Real>& nodes, std::vector<Real>& weights) {
    auto key = std::make_pair(order, Real::default_precision());
    auto it = g_gl_cache.find(key);
    if (it != g_gl_cache.end()) {
        nodes = it->second.first;
        weights = it->second.second;
        return;
    }
    nodes.assign(order, Real(0));
    weights.assign(order, Real(0));
    Real pi = pi_value();
    Real eps = boost::multiprecision::pow(Real(2), -static_cast<int>(Real::default_precision() / 0.302) + 4);
    for (int k = 0; k < order; ++k) {
        Real x = cos(pi * (Real(k) + Real(0.75)) / (Real(order) + Real(0.5)));
        Real p, dp;
        for (int iter = 0; iter < 200; ++iter) {
            legendre_eval(order, x, p, dp);
            Real dx = p / dp;
            x -= dx;
            if (abs(dx) < eps) break;
        }
        legendre_eval(order, x, p, dp);
        nodes[k] = x;
        weights[k] = 2 / ((1 - x * x) * dp * dp);
    }
    // ascending order (callers walk nodes progressively along the path)
    std::vector<size_t> idx(order);
    for (int k = 0; k < order; ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return nodes[i] < nodes[j]; });
    std::vector<Real> ns(order), ws2(order);
    for (int k = 0; k < order; ++k) { ns[k] = nodes[idx[k]]; ws2[k] = weights[idx[k]]; }
    nodes = ns;
    weights = ws2;
    g_gl_cache[key] = {nodes, weights};
}

namespace {

Cplx gl_panel(const CFunc& f, const Segment& seg, const Real& t0, const Real& t1,
              const std::vector<Real>& xs, const std::vector<Real>& ws) {
    Cplx acc;
    Real mid = (t0 + t1) / 2, half = (t1 - t0) / 2;
    for (size_t k = 0; k < xs.size(); ++k) {
        Real t = mid + half * xs[k];
        acc += Cplx(ws[k]) * f(seg.point(t)) * seg.derivative(t);
    }
    return acc * Cplx(half);
}

Cplx adapt(const CFunc& f, const Segment& seg, const Real& t0, const Real& t1,
           const Cplx& whole, const Real& tol, int depth, int max_depth,
           const std::vector<Real>& xs, const std::vector<Real>& ws) {
    Real mid = (t0 + t1) / 2;
    Cplx left = gl_panel(f, seg, t0, mid, xs, ws);
    Cplx right = gl_panel(f, seg, mid, t1, xs, ws);
    Cplx sum = left + right;
    if (abs(sum - whole) <= tol || depth >= max_depth) return sum;
    Real half_tol = tol / 2;
    return adapt(f, seg, t0, mid, left, half_tol, depth + 1, max_depth, xs, ws) +
           adapt(f, seg, mid, t1, right, half_tol, depth + 1, max_depth, xs, ws);
}

}  // namespace

Cplx integrate_segment(const CFunc& f, const Segment& seg, const Real& tol,
                       int order, int max_depth) {
    std::vector<Real> xs, ws;
    gauss_legendre(order, xs, ws);
    Cplx whole = gl_panel(f, seg, Real(0), Real(1), xs, ws);
    return adapt(f, seg, Real(0), Real(1), whole, tol, 0, max_depth, xs, ws);
}

Cplx integrate(const CFunc& f, const Contour& contour, const Real& tol,
               int order, int max_depth) {
    if (contour.segments.empty()) return Cplx();
    Real seg_tol = tol / static_cast<int>(contour.segments.size());
    Cplx acc;
    for (const auto& seg : contour.segments)
        acc += integrate_segment(f, seg, seg_tol, order, max_depth);
    return acc;
}

}  // namespace hpsurf
