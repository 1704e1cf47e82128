#include "hpsurf/curve.hpp"

#include <algorithm>
#include <stdexcept>

namespace hpsurf {

using boost::multiprecision::abs;
using boost::multiprecision::sqrt;

CaseId classify_case(const Real& a) {
    Real half = Real(1) / 2;
    Real eps = boost::multiprecision::pow(Real(2), -static_cast<int>(Real::default_precision() / 0.302) + 24);
    if (abs(a * a - half) < eps) return CaseId::II;
    return (a * a < half) ? CaseId::I : CaseId::III;
}

CurveParams make_params(const Real& a) {
    CurveParams cp;
    cp.a = a;
    cp.case_id = classify_case(a);
    cp.p = sqrt((1 + a * a) / 3);  // Case I callers retune p afterwards
    return cp;
}

CurveParams make_params(const Real& a, const Real& p) {
    CurveParams cp;
    cp.a = a;
    cp.p = p;
    cp.case_id = classify_case(a);
    return cp;
}

std::array<Cplx, 3> solve_branches(const CurveParams& cp, const Cplx& z) {
    // Monic form: H^3 + P H + Q = 0 with H = A h, P = -3 A B2, Q = -2 A^2 B1.
    Cplx A = cp.A(z), B2 = cp.B2(z), B1 = cp.B1(z);
    Cplx P = Cplx(Real(-3)) * A * B2;
    Cplx Q = Cplx(Real(-2)) * A * A * B1;

    std::array<Cplx, 3> H;
    Cplx disc = (Q * Q) / Cplx(Real(4)) + (P * P * P) / Cplx(Real(27));
    Cplx s = hpsurf::sqrt(disc);
    Cplx cand1 = -Q / Cplx(Real(2)) + s, cand2 = -Q / Cplx(Real(2)) - s;
    Cplx u3 = (abs(cand1) >= abs(cand2)) ? cand1 : cand2;
    if (abs(u3) == 0) {
        H = {Cplx(), Cplx(), Cplx()};
    } else {
        Cplx u = hpsurf::exp(hpsurf::log(u3) / Cplx(Real(3)));
        Cplx v = -P / (Cplx(Real(3)) * u);
        Real half_sqrt3 = sqrt(Real(3)) / 2;
        Cplx w1(Real(-1) / 2, half_sqrt3), w2(Real(-1) / 2, -half_sqrt3);
        H = {u + v, w1 * u + w2 * v, w2 * u + w1 * v};
    }
    // Newton polish (restores full working precision after the Cardano
    // cancellation); skipped when the derivative underflows near a
    // ramification point.
    for (auto& t : H) {
        for (int it = 0; it < 4; ++it) {
            Cplx f = t * t * t + P * t + Q;
            Cplx df = Cplx(Real(3)) * t * t + P;
            if (abs(df) == 0) break;
            Cplx step = f / df;
            Real scale = 1 + abs(t);
            if (abs(step) > scale / 2) break;  // keep polish local
            t -= step;
        }
    }
    if (abs(A) == 0) throw std::runtime_error("solve_branches: z is a hard branch point");
    return {H[0] / A, H[1] / A, H[2] / A};
}

Real default_base_point(const CurveParams& cp) {
    BranchPoints bp = branch_points(cp);
    Real m = 1;
    for (const auto& e : bp.points) {
        Real r = abs(e);
        if (r > m) m = r;
    }
    return 2 * m + 1;
}

BranchTriple label_at_base(const CurveParams& cp, const Real& x0) {
    auto roots = solve_branches(cp, Cplx(x0));
    std::sort(roots.begin(), roots.end(), [](const Cplx& x, const Cplx& y) { return x.re > y.re; });
    BranchTriple t;
    t.z = Cplx(x0);
    t.h = roots;
    return t;
}

BranchTriple base_triple(const CurveParams& cp) {
    return label_at_base(cp, default_base_point(cp));
}

Cplx discriminant(const CurveParams& cp, const Cplx& z) {
    Cplx A = cp.A(z), B2 = cp.B2(z), B1 = cp.B1(z);
    return Cplx(Real(108)) * A * (B2 * B2 * B2 - A * B1 * B1);
}

BranchPoints branch_points(const CurveParams& cp) {
    // Non-trivial factor of the discriminant is a quadratic in u = z^2:
    //   (1+a^2-3p^2) u^2 + (3p^4-a^2) u - p^6.
    Real q4 = 1 + cp.a * cp.a - 3 * cp.p * cp.p;
    Real q2 = 3 * boost::multiprecision::pow(cp.p, 4) - cp.a * cp.a;
    Real q0 = -boost::multiprecision::pow(cp.p, 6);
    BranchPoints bp;
    Real tiny = boost::multiprecision::pow(Real(2), -static_cast<int>(Real::default_precision() / 0.302) + 32);
    bp.points = {Cplx(Real(1)), Cplx(Real(-1)), Cplx(cp.a), Cplx(-cp.a)};
    if (abs(q4) < tiny) {
        // cases II/III: single positive root u = b^2
        Real u = -q0 / q2;
        bp.b = sqrt(u);
        bp.points.push_back(Cplx(bp.b));
        bp.points.push_back(Cplx(-bp.b));
    } else {
        Real d = q2 * q2 - 4 * q4 * q0;
        if (d < 0) throw std::runtime_error("branch_points: complex quadratic roots (invalid parameters)");
        Real sd = sqrt(d);
        Real u1 = (-q2 + sd) / (2 * q4);
        Real u2 = (-q2 - sd) / (2 * q4);
        Real upos = (u1 > 0) ? u1 : u2;
        Real uneg = (u1 > 0) ? u2 : u1;
        if (upos <= 0 || uneg >= 0)
            throw std::runtime_error("branch_points: expected one positive and one negative root");
        bp.b = sqrt(upos);
        bp.c = sqrt(-uneg);
        bp.points.push_back(Cplx(bp.b));
        bp.points.push_back(Cplx(-bp.b));
        bp.points.push_back(Cplx(Real(0), bp.c));
        bp.points.push_back(Cplx(Real(0), -bp.c));
    }
    return bp;
}

InfinityCoeffs infinity_coeffs(const CurveParams& cp) {
    InfinityCoeffs ic;
    ic.alpha = {Cplx(), Cplx(), Cplx()};
    ic.beta = {Cplx(), Cplx(), Cplx()};
    Real one_plus_a2 = 1 + cp.a * cp.a;
    if (cp.case_id == CaseId::I) {
        Real alpha2 = one_plus_a2 / 3 - cp.p * cp.p;
        if (alpha2 < 0) throw std::runtime_error("infinity_coeffs: negative alpha^2 in Case I");
        Real alpha = sqrt(alpha2);
        ic.alpha[1] = Cplx(alpha);
        ic.alpha[2] = Cplx(-alpha);
    } else {
        // 3 b^2 + 2(1+a^2) b + a^2 = 0
        Real disc = one_plus_a2 * one_plus_a2 - 3 * cp.a * cp.a;
        Real sd = sqrt(disc);
        ic.beta[1] = Cplx((-one_plus_a2 + sd) / 3);
        ic.beta[2] = Cplx((-one_plus_a2 - sd) / 3);
    }
    // sheet 0: h0 = 2/z + 0/z^2 + beta0/z^3; series gives beta0 when needed
    return ic;
}

std::array<Series, 3> infinity_series(const CurveParams& cp, size_t nterms) {
    // Solve G(w, tau) = At w^3 - 3 B2t w - 2 = 0 for w(tau), h = tau w,
    // with At = tau^4 A(1/tau), B2t = tau^2 B2(1/tau).
    size_t L = nterms + 2;
    Series At(L), B2t(L);
    At.c[0] = Cplx(Real(1));
    if (L > 2) At.c[2] = Cplx(-(1 + cp.a * cp.a));
    if (L > 4) At.c[4] = Cplx(cp.a * cp.a);
    B2t.c[0] = Cplx(Real(1));
    if (L > 2) B2t.c[2] = Cplx(-cp.p * cp.p);
    Series two = Series::constant(Cplx(Real(2)), L);
    Series three_B2t = Cplx(Real(3)) * B2t;

    Real tol = boost::multiprecision::pow(Real(2), -static_cast<int>(Real::default_precision() / 0.302) + 48);

    InfinityCoeffs ic = infinity_coeffs(cp);
    std::array<Series, 3> seeds;
    seeds[0] = Series::constant(Cplx(Real(2)), L);
    for (int k = 1; k <= 2; ++k) {
        Series s = Series::constant(Cplx(Real(-1)), L);
        if (L > 1) s.c[1] = ic.alpha[k];
        if (L > 2) s.c[2] = ic.beta[k];
        seeds[k] = s;
    }

    std::array<Series, 3> out;
    for (int k = 0; k < 3; ++k) {
        Series w = seeds[k];
        size_t iters = 8 + 2 * static_cast<size_t>(std::max<size_t>(1, L));
        for (size_t it = 0; it < iters; ++it) {
            Series G = At * (w * w * w) - three_B2t * w - two;
            Series dG = Cplx(Real(3)) * (At * (w * w)) - three_B2t;
            if (G.valuation(tol) >= L) break;
            w -= Series::divide(G, dG, tol);
        }
        Series G = At * (w * w * w) - three_B2t * w - two;
        if (G.valuation(tol) + 2 < nterms)
            throw std::runtime_error("infinity_series: Newton iteration failed to converge");
        // h = tau * w : shift by one
        Series h(nterms);
        for (size_t m = 1; m < nterms && m - 1 < w.size(); ++m) h.c[m] = w.c[m - 1];
        out[k] = h;
    }
    return out;
}

// --- continuation ----------------------------------------------------------

static BranchTriple assign_roots(const std::array<Cplx, 3>& pred, const Cplx& z,
                                 const std::array<Cplx, 3>& roots) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Real best(-1), second(-1);
    int best_idx = 0;
    for (int pi = 0; pi < 6; ++pi) {
        Real cost(0);
        for (int k = 0; k < 3; ++k) cost += abs(roots[perms[pi][k]] - pred[k]);
        if (best < 0 || cost < best) {
            second = best;
            best = cost;
            best_idx = pi;
        } else if (second < 0 || cost < second) {
            second = cost;
        }
    }
    // require a decisive margin between the best and second-best assignment
    if (second >= 0 && best > second / 2)
        throw std::runtime_error("match_fiber: ambiguous continuation step");
    BranchTriple t;
    t.z = z;
    for (int k = 0; k < 3; ++k) t.h[k] = roots[perms[best_idx][k]];
    return t;
}

BranchTriple match_fiber(const BranchTriple& prev, const Cplx& z, const std::array<Cplx, 3>& roots) {
    return assign_roots(prev.h, z, roots);
}

// Germ velocity dh/dz = -F_z / F_h from implicit differentiation of the
// defining cubic F(z, h) = A h^3 - 3 B2 h - 2 B1.
static Cplx germ_velocity(const CurveParams& cp, const Cplx& z, const Cplx& h) {
    Cplx z2 = z * z;
    Cplx Ap = Cplx(Real(2)) * z * ((z2 - Cplx(cp.a * cp.a)) + (z2 - Cplx(Real(1))));
    Cplx Fz = Ap * h * h * h - Cplx(Real(6)) * z * h - Cplx(Real(2));
    return -(Fz / cp.Fh(z, h));
}

// One continuation step with first-order prediction.  Near infinity two of
// the branches coalesce like 1/z^3, far faster than they move, so matching
// against the raw previous values would force steps proportional to the
// separation; predicting with the implicit derivative keeps the assignment
// decisive at step sizes set by the local scale instead.
static BranchTriple continue_step(const CurveParams& cp, const BranchTriple& prev, const Cplx& z) {
    Cplx dz = z - prev.z;
    std::array<Cplx, 3> pred;
    for (int k = 0; k < 3; ++k) {
        Cplx move = germ_velocity(cp, prev.z, prev.h[k]) * dz;
        // a wild derivative (germ close to a branch point) predicts worse
        // than standing still; the adaptive step control handles that case
        if (abs(move) > 1 + abs(prev.h[k])) move = Cplx();
        pred[k] = prev.h[k] + move;
    }
    return assign_roots(pred, z, solve_branches(cp, z));
}

namespace {

struct StepPanel {
    // integral of h_k dz over one parameter step, with progressive labeling
    std::array<Cplx, 3> integrals;
    BranchTriple end;
};

using FiberFn = std::function<Cplx(const Cplx&, const Cplx&)>;

StepPanel panel(const CurveParams& cp, const Segment& seg, const BranchTriple& at_t0,
                const Real& t0, const Real& t1, const std::vector<Real>& xs,
                const std::vector<Real>& ws, bool accumulate, const FiberFn* fiber) {
    StepPanel r;
    r.integrals = {Cplx(), Cplx(), Cplx()};
    BranchTriple cur = at_t0;
    Real mid = (t0 + t1) / 2, half = (t1 - t0) / 2;
    if (accumulate) {
        for (size_t j = 0; j < xs.size(); ++j) {
            Real t = mid + half * xs[j];
            Cplx z = seg.point(t);
            cur = continue_step(cp, cur, z);
            Cplx jac = seg.derivative(t) * Cplx(half * ws[j]);
            for (int k = 0; k < 3; ++k)
                r.integrals[k] += (fiber ? (*fiber)(z, cur.h[k]) : cur.h[k]) * jac;
        }
    }
    Cplx z1 = seg.point(t1);
    cur = continue_step(cp, cur, z1);
    r.end = cur;
    return r;
}

// Radius of a disk centered at the origin containing every branch point.
// Branch points are the zeros of A and of B2^3 - A B1^2; the z^6 terms of
// the latter cancel, leaving a quadratic in w = z^2 whose roots obey the
// Cauchy bound.
Real branch_radius_bound(const CurveParams& cp) {
    Real p2 = cp.p * cp.p, a2 = cp.a * cp.a;
    Real alpha = 1 + a2 - 3 * p2;
    Real beta = 3 * p2 * p2 - a2;
    Real gamma = -p2 * p2 * p2;
    Real wbound;
    if (abs(alpha) > Real("1e-10")) {
        wbound = 1 + (std::max)(Real(abs(beta) / abs(alpha)), Real(abs(gamma) / abs(alpha)));
    } else if (abs(beta) > Real("1e-10")) {
        wbound = 1 + abs(gamma) / abs(beta);
    } else {
        wbound = 1;
    }
    return (std::max)(Real(1), Real(sqrt(wbound)));
}

}  // namespace

static TransportResult transport_impl(const CurveParams& cp, const BranchTriple& start,
                                      const Contour& path, const Real& tol, bool accumulate,
                                      const FiberFn* fiber = nullptr) {
    TransportResult res;
    res.end = start;
    res.integrals = {Cplx(), Cplx(), Cplx()};

    Real total_len(0);
    for (const auto& seg : path.segments) total_len += seg.length_estimate();
    if (total_len == 0) return res;
    Real tol_density = tol / total_len;

    std::vector<Real> xs, ws;
    gauss_legendre(10, xs, ws);

    // far from every branch point the fiber varies on the scale of the
    // distance, so the arc-length cap may grow with it
    Real rbound = branch_radius_bound(cp);
    auto step_cap = [&](const Cplx& z) -> Real {
        Real excess = abs(z) - rbound;
        if (excess < 0) excess = 0;
        Real cap = Real("0.1") * (1 + excess);
        return cap;
    };

    for (const auto& seg : path.segments) {
        Real len = seg.length_estimate();
        if (len == 0) continue;
        Real step_len = (std::min)(Real(len / 8), step_cap(seg.point(Real(0))));
        Real t(0);
        // re-anchor the triple at the segment start; if the previous point is
        // elsewhere, continue along the connecting straight segment first
        {
            Cplx z0 = seg.point(Real(0));
            if (abs(z0 - res.end.z) > Real("1e-30")) {
                Contour bridge = Contour::segment(res.end.z, z0);
                res.end = transport_impl(cp, res.end, bridge, tol, false).end;
            }
        }
        while (t < 1) {
            Real dt = step_len / len;
            if (t + dt > 1) dt = Real(1) - t;
            bool ok = true;
            StepPanel whole, left, right;
            try {
                whole = panel(cp, seg, res.end, t, t + dt, xs, ws, accumulate, fiber);
                Real tm = t + dt / 2;
                left = panel(cp, seg, res.end, t, tm, xs, ws, accumulate, fiber);
                right = panel(cp, seg, left.end, tm, t + dt, xs, ws, accumulate, fiber);
            } catch (const std::runtime_error&) {
                ok = false;
            }
            Real err(0);
            if (ok) {
                // halves must agree with the whole panel, and the two
                // labelings must land on the same triple
                for (int k = 0; k < 3; ++k) {
                    if (accumulate)
                        err = (std::max)(err, abs(whole.integrals[k] - left.integrals[k] - right.integrals[k]));
                    err = (std::max)(err, abs(whole.end.h[k] - right.end.h[k]) / (1 + abs(right.end.h[k])));
                }
            }
            Real allowed = tol_density * dt * len + tol / 1000000;
            if (!ok || err > allowed) {
                step_len /= 2;
                if (step_len < total_len * Real("1e-40"))
                    throw std::runtime_error("transport: step size underflow (path too close to a branch point?)");
                continue;
            }
            if (accumulate)
                for (int k = 0; k < 3; ++k) res.integrals[k] += left.integrals[k] + right.integrals[k];
            res.end = right.end;
            res.steps += 2;
            t += dt;
            Real cap = step_cap(res.end.z);
            if (err < allowed / 100 && step_len < cap) step_len = (std::min)(Real(step_len * 2), cap);
        }
    }
    return res;
}

TransportResult transport(const CurveParams& cp, const BranchTriple& start,
                          const Contour& path, const Real& tol) {
    return transport_impl(cp, start, path, tol, true);
}

BranchTriple continue_triple(const CurveParams& cp, const BranchTriple& start, const Contour& path) {
    return transport_impl(cp, start, path, Real("1e-20"), false).end;
}

TransportResult transport_fiber(const CurveParams& cp, const BranchTriple& start,
                                const Contour& path,
                                const std::function<Cplx(const Cplx&, const Cplx&)>& f,
                                const Real& tol) {
    return transport_impl(cp, start, path, tol, true, &f);
}

}  // namespace hpsurf
