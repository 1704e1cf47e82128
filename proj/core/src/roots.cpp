#include "hpsurf/roots.hpp"
#include "hpsurf/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

namespace hpsurf {

using boost::multiprecision::abs;

Real find_root(const RFunc& f, Real a, Real b, const Real& tol, int max_iter) {
    Real fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0) throw std::invalid_argument("find_root: endpoints do not bracket a root");
    // Brent's method: inverse quadratic / secant steps guarded by bisection.
    Real c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (abs(fc) < abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        Real tol1 = 2 * boost::multiprecision::pow(Real(2), -static_cast<int>(Real::default_precision() / 0.302)) * abs(b) + tol / 2;
        Real xm = (c - b) / 2;
        if (abs(xm) <= tol1 || fb == 0) return b;
        if (abs(e) >= tol1 && abs(fa) > abs(fb)) {
            Real s = fb / fa, p, q;
            if (a == c) {  // secant
                p = 2 * xm * s;
                q = 1 - s;
            } else {  // inverse quadratic interpolation
                Real qq = fa / fc, r = fb / fc;
                p = s * (2 * xm * qq * (qq - r) - (b - a) * (r - 1));
                q = (qq - 1) * (r - 1) * (s - 1);
            }
            if (p > 0) q = -q;
            p = abs(p);
            Real lim1 = 3 * xm * q - abs(tol1 * q), lim2 = abs(e * q);
            if (2 * p < (std::min)(lim1, lim2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (abs(d) > tol1)
            b += d;
        else
            b += (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

namespace {

Cplx poly_eval(const std::vector<Cplx>& c, const Cplx& z, Cplx* dp = nullptr) {
    Cplx p, d;
    for (size_t k = c.size(); k-- > 0;) {
        if (dp) d = d * z + p;
        p = p * z + c[k];
    }
    if (dp) *dp = d;
    return p;
}

}  // namespace

std::vector<Cplx> poly_roots(const std::vector<Cplx>& coeffs_in, const Real& tol, int max_iter) {
    std::vector<Cplx> c = coeffs_in;
    while (!c.empty() && abs(c.back()) == 0) c.pop_back();
    if (c.size() <= 1) return {};
    int n = static_cast<int>(c.size()) - 1;

    // strip zero roots at the origin
    std::vector<Cplx> roots;
    size_t zshift = 0;
    while (zshift < c.size() - 1 && abs(c[zshift]) == 0) ++zshift;
    for (size_t k = 0; k < zshift; ++k) roots.push_back(Cplx());
    c.erase(c.begin(), c.begin() + zshift);
    n = static_cast<int>(c.size()) - 1;
    if (n == 0) return roots;

    // Aberth-Ehrlich with the classical circle initialization: radius from the
    // Cauchy bound, angles spread with an irrational offset so symmetric
    // configurations do not stall.
    Real r(0);
    for (int k = 0; k < n; ++k) {
        Real b = boost::multiprecision::pow(abs(c[k] / c[n]), Real(1) / (n - k));
        if (b > r) r = b;
    }
    r = 1 + 2 * r;
    std::vector<Cplx> z(n);
    Real pi = pi_value();
    for (int k = 0; k < n; ++k)
        z[k] = polar(r * (Real(1) + Real(k % 3) / 10), 2 * pi * k / n + Real("0.55"));

    for (int iter = 0; iter < max_iter; ++iter) {
        Real worst(0);
        for (int k = 0; k < n; ++k) {
            Cplx d;
            Cplx p = poly_eval(c, z[k], &d);
            Cplx ratio = (abs(d) == 0) ? Cplx(Real("1e-30")) : p / d;
            Cplx s;
            for (int j = 0; j < n; ++j)
                if (j != k) s += Cplx(Real(1)) / (z[k] - z[j]);
            Cplx denom = Cplx(Real(1)) - ratio * s;
            Cplx step = ratio / denom;
            z[k] -= step;
            Real rel = abs(step) / (1 + abs(z[k]));
            if (rel > worst) worst = rel;
        }
        if (worst < tol) break;
    }
    for (auto& zk : z) roots.push_back(zk);
    return roots;
}

long count_zeros(const CF& f, const Cplx& lo, const Cplx& hi, int max_refine) {
    // Track arg f along the boundary, inserting midpoints until consecutive
    // samples differ by less than pi/2; the winding number is the total phase
    // change divided by 2 pi and must come out near an integer.
    Contour box = Contour::rectangle(lo, hi);
    Real pi = pi_value();
    struct Node { Real t; Real ph; };
    auto wrap = [&](Real dph) {
        while (dph > pi) dph -= 2 * pi;
        while (dph < -pi) dph += 2 * pi;
        return dph;
    };
    Real total(0);
    for (const auto& seg : box.segments) {
        std::vector<Node> nodes;
        const int init = 8;
        for (int k = 0; k <= init; ++k) {
            Real t = Real(k) / init;
            nodes.push_back({t, arg(f(seg.point(t)))});
        }
        for (int pass = 0; pass < max_refine; ++pass) {
            bool added = false;
            std::vector<Node> out;
            out.push_back(nodes[0]);
            for (size_t k = 1; k < nodes.size(); ++k) {
                if (abs(wrap(nodes[k].ph - nodes[k - 1].ph)) > pi / 2 && nodes.size() < 200000) {
                    Real tm = (nodes[k].t + nodes[k - 1].t) / 2;
                    out.push_back({tm, arg(f(seg.point(tm)))});
                    added = true;
                }
                out.push_back(nodes[k]);
            }
            nodes.swap(out);
            if (!added) break;
        }
        for (size_t k = 1; k < nodes.size(); ++k) total += wrap(nodes[k].ph - nodes[k - 1].ph);
    }
    Real turns = total / (2 * pi);
    long n = static_cast<long>(boost::multiprecision::round(turns).convert_to<long>());
    if (abs(turns - n) > Real(1) / 4)
        throw std::runtime_error("count_zeros: winding number did not converge to an integer");
    return n;
}

Cplx polish_zero(const CF& f, Cplx z0, const Real& tol, int max_iter) {
    // secant method with a complex step seed
    Cplx z1 = z0 + Cplx(tol + abs(z0) * Real("1e-6"), tol);
    Cplx f0 = f(z0), f1 = f(z1);
    for (int k = 0; k < max_iter; ++k) {
        Cplx df = f1 - f0;
        if (abs(df) == 0) break;
        Cplx z2 = z1 - f1 * (z1 - z0) / df;
        z0 = z1; f0 = f1;
        z1 = z2; f1 = f(z1);
        if (abs(z1 - z0) < tol * (1 + abs(z1))) break;
    }
    return z1;
}

}  // namespace hpsurf
