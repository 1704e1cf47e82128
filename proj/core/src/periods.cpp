#include "hpsurf/periods.hpp"

#include "hpsurf/quadrature.hpp"
#include "hpsurf/roots.hpp"

#include <algorithm>

namespace hpsurf {

namespace {

// Labeled germ triple at the leg's anchor point, continued from the base
// point along base -> approach -> anchor (both segments cut-free by the
// construction in build_cycles).
BranchTriple anchor_triple(const CurveParams& cp, const CycleLeg& leg) {
    Cplx anchor = leg.z0 + leg.anchor_t * (leg.z1 - leg.z0);
    Cplx base = Cplx(default_base_point(cp));
    Contour path;
    path.add_line(base, leg.approach);
    path.add_line(leg.approach, anchor);
    return continue_triple(cp, base_triple(cp), path);
}

}  // namespace

// Germ walk from the anchor A to the endpoint E, with substitution
// z(u) = E + (A - E) u^m.  The walk proceeds from u = 1 (anchor, where the
// germ is known) toward u = 0, matching fibers against a Lagrange prediction
// in the rescaled variable y = u^(m-1) h, which stays analytic in u even
// where the germs blow up at u = 0.  Geometric levels [2^-(k+1), 2^-k]
// toward u = 0 keep the node spacing proportional to u, so a nearby
// singularity is resolved at every scale (the leg may pass exponentially
// close to another branch point).  Gauss-Legendre panels never evaluate at
// u = 0 itself.
WalkData walk_samples(const CurveParams& cp, const BranchTriple& Tanchor, const Cplx& A,
                      const Cplx& E, int m, int label, const Real& tol, int nsub) {
    WalkData wd;
    wd.dir = A - E;
    wd.m = m;
    if (abs(wd.dir) == 0) {
        wd.u_min = Real(1);
        return wd;
    }

    static const int kOrder = 16;
    std::vector<Real> gx, gw;
    gauss_legendre(kOrder, gx, gw);

    Real lg2 = log(Real(2));
    long nlevels = 3 + (long)((-log(tol) / lg2 / 4)).convert_to<double>();
    if (nlevels < 16) nlevels = 16;
    wd.u_min = pow(Real(1) / 2, (double)nlevels);

    // full prediction triples (scaled); wd stores only the tracked label
    std::vector<std::array<Cplx, 3>> ys;
    wd.u.push_back(Real(1));
    wd.z.push_back(A);
    wd.h.push_back(Tanchor.h[label]);
    wd.w.push_back(Real(0));  // anchor node: sample only
    ys.push_back(Tanchor.h);  // y = h at u = 1 (z = A)

    std::vector<std::pair<Real, Real>> panels;  // (lo, hi), descending
    for (long k = 0; k < nlevels; ++k) {
        Real hi = pow(Real(1) / 2, (double)k), lo = hi / 2;
        for (int s = nsub - 1; s >= 0; --s)
            panels.emplace_back(lo + (hi - lo) * Real(s) / nsub,
                                lo + (hi - lo) * Real(s + 1) / nsub);
    }
    for (const auto& pan : panels) {
        Real mid = (pan.first + pan.second) / 2, half = (pan.second - pan.first) / 2;
        // nodes descending in u
        for (int q = kOrder - 1; q >= 0; --q) {
            Real u = mid + half * gx[q];
            Real uscale = pow(u, m - 1);
            Cplx z = E + wd.dir * pow_int(Cplx(u), m);
            std::array<Cplx, 3> roots = solve_branches(cp, z);
            std::array<Cplx, 3> yroots;
            for (int k = 0; k < 3; ++k) yroots[k] = Cplx(uscale) * roots[k];
            std::array<Cplx, 3> pred;
            size_t n = wd.u.size();
            size_t pts = (std::min)(n, size_t(4));
            for (int k = 0; k < 3; ++k) {
                // Lagrange extrapolation through the last `pts` samples
                Cplx acc(Real(0));
                for (size_t i = n - pts; i < n; ++i) {
                    Real w(1);
                    for (size_t l = n - pts; l < n; ++l)
                        if (l != i) w *= (u - wd.u[l]) / (wd.u[i] - wd.u[l]);
                    acc = acc + Cplx(w) * ys[i][k];
                }
                pred[k] = acc;
            }
            // Assign the tracked germ by proximity to its prediction with
            // a decisive margin; the other two labels are matched without
            // one (the leg may pass interior branch points where *they*
            // collide, e.g. the other two sheets' cut inside the leg).
            std::array<Cplx, 3> cur;
            {
                int bi = 0;
                Real bd(-1), sd(-1);
                for (int k = 0; k < 3; ++k) {
                    Real d = abs(yroots[k] - pred[label]);
                    if (bd < 0 || d < bd) {
                        sd = bd;
                        bd = d;
                        bi = k;
                    } else if (sd < 0 || d < sd) {
                        sd = d;
                    }
                }
                if (bd * 2 > sd)
                    throw ClosureFailure("germ continuation ambiguous along leg");
                cur[label] = yroots[bi];
                int others[2], oroots[2], oi = 0;
                for (int k = 0; k < 3; ++k) {
                    if (k != label) others[oi] = k, oi++;
                }
                oi = 0;
                for (int k = 0; k < 3; ++k) {
                    if (k != bi) oroots[oi] = k, oi++;
                }
                Real c0 = abs(yroots[oroots[0]] - pred[others[0]]) +
                          abs(yroots[oroots[1]] - pred[others[1]]);
                Real c1 = abs(yroots[oroots[1]] - pred[others[0]]) +
                          abs(yroots[oroots[0]] - pred[others[1]]);
                cur[others[0]] = yroots[c0 <= c1 ? oroots[0] : oroots[1]];
                cur[others[1]] = yroots[c0 <= c1 ? oroots[1] : oroots[0]];
            }
            wd.u.push_back(u);
            wd.z.push_back(z);
            wd.h.push_back(Cplx(Real(1) / uscale) * cur[label]);
            wd.w.push_back(half * gw[q]);
            ys.push_back(cur);
        }
    }
    return wd;
}

// int_A^E f dz over the sampled walk.  The combination W(u) = u^(m-1) f is
// analytic at u = 0 whenever f has pole order at most m-1 in the local
// parameter; the truncated tail [0, u_min] integrates the quartic through
// W-samples near u_min * {1, 2, 4, 8, 16} (geometrically spread, so the
// extrapolation down to 0 stays well conditioned), residual O(u_min^6).
Cplx walk_integral(const WalkData& wd, const FiberIntegrand& f) {
    std::vector<Cplx> vals(wd.u.size());
    for (size_t i = 0; i < wd.u.size(); ++i) vals[i] = f(wd.z[i], wd.h[i]);
    return walk_integral_values(wd, vals);
}

Cplx walk_integral_values(const WalkData& wd, const std::vector<Cplx>& vals) {
    if (wd.u.empty()) return Cplx(Real(0));
    const int m = wd.m;
    std::vector<Cplx> W(wd.u.size());
    Cplx sum(Real(0));
    for (size_t i = 0; i < wd.u.size(); ++i) {
        Real uscale = pow(wd.u[i], m - 1);
        W[i] = Cplx(uscale) * vals[i];
        sum = sum + Cplx(wd.w[i]) * W[i];
    }
    {
        std::array<Real, 5> tu;
        std::array<Cplx, 5> ty;
        for (int i = 0; i < 5; ++i) {
            Real target = wd.u_min * (1 << i);
            size_t bestj = wd.u.size() - 1;
            Real bestd(-1);
            for (size_t jj = wd.u.size(); jj-- > 0;) {
                Real d = abs(wd.u[jj] - target);
                if (bestd < 0 || d < bestd) {
                    bestd = d;
                    bestj = jj;
                }
                if (wd.u[jj] > target * 4) break;
            }
            tu[i] = wd.u[bestj];
            ty[i] = W[bestj];
        }
        std::vector<Real> tx, tw;
        gauss_legendre(8, tx, tw);
        for (size_t q = 0; q < tx.size(); ++q) {
            Real u = wd.u_min / 2 + wd.u_min / 2 * tx[q];
            Cplx val(Real(0));
            for (int i = 0; i < 5; ++i) {
                Real w(1);
                for (int l = 0; l < 5; ++l)
                    if (l != i) w *= (u - tu[l]) / (tu[i] - tu[l]);
                val = val + Cplx(w) * ty[i];
            }
            sum = sum + Cplx(wd.u_min / 2 * tw[q]) * val;
        }
    }
    // integral from A to E: u runs 1 -> 0, so flip sign of du
    return Cplx(Real(0)) - wd.dir * Cplx(Real(m)) * sum;
}

namespace {

// One endpoint walk with nsub-refinement until two successive node densities
// agree to tol.
Cplx half_walk_f(const CurveParams& cp, const BranchTriple& Tanchor, const Cplx& A,
                 const Cplx& E, int m, int label, const FiberIntegrand& f, const Real& tol) {
    if (abs(A - E) == 0) return Cplx(Real(0));
    bool have_last = false;
    Cplx last;
    for (int nsub = 1; nsub <= 64; nsub *= 2) {
        Cplx cur;
        try {
            WalkData wd = walk_samples(cp, Tanchor, A, E, m, label, tol, nsub);
            cur = walk_integral(wd, f);
        } catch (const ClosureFailure&) {
            // matching failed at this resolution; halve the node spacing
            have_last = false;
            continue;
        }
        if (have_last && abs(cur - last) < tol) return cur;
        last = cur;
        have_last = true;
    }
    throw ClosureFailure("leg integral did not converge: germ continuation unstable");
}

}  // namespace

BranchTriple leg_anchor_triple(const CurveParams& cp, const CycleLeg& leg) {
    return anchor_triple(cp, leg);
}

Cplx leg_integral_f(const CurveParams& cp, const CycleLeg& leg, const FiberIntegrand& f,
                    const Real& tol) {
    BranchTriple T = anchor_triple(cp, leg);
    Cplx anchor = leg.z0 + leg.anchor_t * (leg.z1 - leg.z0);
    Cplx to_z0 = half_walk_f(cp, T, anchor, leg.z0, leg.m0, leg.label, f, tol / 4);
    Cplx to_z1 = half_walk_f(cp, T, anchor, leg.z1, leg.m1, leg.label, f, tol / 4);
    // int_{z0}^{z1} = int_{A}^{z1} - int_{A}^{z0}
    return to_z1 - to_z0;
}

Cplx leg_integral(const CurveParams& cp, const CycleLeg& leg, const Real& tol) {
    return leg_integral_f(
        cp, leg, [](const Cplx&, const Cplx& h) -> Cplx { return h; }, tol);
}

Cplx period_f(const CurveParams& cp, const HomologyCycle& cycle, const FiberIntegrand& f,
              const Real& tol) {
    if (cycle.legs.empty()) throw ClosureFailure("cycle has no legs");
    for (size_t i = 0; i < cycle.legs.size(); ++i) {
        const CycleLeg& cur = cycle.legs[i];
        const CycleLeg& nxt = cycle.legs[(i + 1) % cycle.legs.size()];
        if (abs(cur.z1 - nxt.z0) > Real(1e-30))
            throw ClosureFailure("cycle legs do not chain: " + cycle.name);
    }
    Cplx sum(Real(0));
    Real leg_tol = tol / Real((double)cycle.legs.size());
    for (const CycleLeg& leg : cycle.legs) sum = sum + leg_integral_f(cp, leg, f, leg_tol);
    return sum;
}

Cplx period_dN(const CurveParams& cp, const HomologyCycle& cycle, const Real& tol) {
    return period_f(
        cp, cycle, [](const Cplx&, const Cplx& h) -> Cplx { return h; }, tol);
}

namespace {

CycleLeg mk(const Cplx& z0, const Cplx& z1, int label, int m0, int m1, const Cplx& approach) {
    CycleLeg l;
    l.z0 = z0;
    l.z1 = z1;
    l.label = label;
    l.m0 = m0;
    l.m1 = m1;
    l.approach = approach;
    return l;
}

Cplx mid_of(const Cplx& z0, const Cplx& z1) { return (z0 + z1) / Cplx(Real(2)); }

// A bank cycle around the real interval [lo, hi]: upper bank left -> right on
// the germ, then lower bank right -> left (clockwise).  With the sheet-0 germ
// this produces the period  int (h0+ - h0-) dx  over the interval.
HomologyCycle bank_cycle(const std::string& name, const Real& lo, const Real& hi,
                         int label, int m_lo, int m_hi, const Real& height) {
    HomologyCycle c;
    c.name = name;
    Cplx a(lo), b(hi);
    Cplx up(Real(0), height), dn(Real(0), -height);
    c.legs.push_back(mk(a, b, label, m_lo, m_hi, mid_of(a, b) + up));
    c.legs.push_back(mk(b, a, label, m_hi, m_lo, mid_of(a, b) + dn));
    return c;
}

}  // namespace

CycleSet build_cycles(const CurveParams& cp, const BranchPoints& bp) {
    CycleSet cs;
    const Real a = cp.a, b = bp.b, c = bp.c;
    const Real h = Real(1) / 5;  // approach height; every cut lies on an axis

    if (cp.case_id == CaseId::I) {
        cs.g = 2;
        // cuts: [-a,a] joins sheets 0-1; [-1,-b] and [b,1] join 0-2;
        // the imaginary axis beyond +-ic joins 1-2.  Gaps: (a,b) and mirror.
        cs.betas.push_back(bank_cycle("beta1", -Real(1), -b, 0, 2, 2, h));
        cs.betas.push_back(bank_cycle("beta2", -a, a, 0, 2, 2, h));

        const Real half_c = c / 2;
        const Real hd = (std::min)(h, half_c);  // stay clear of the imaginary cuts
        Cplx zero(Real(0)), mic(Real(0), -c), pic(Real(0), c);

        HomologyCycle a1;
        a1.name = "alpha1";
        a1.legs.push_back(mk(Cplx(-a), Cplx(-b), 0, 2, 2, Cplx(-(a + b) / 2, h)));
        a1.legs.push_back(mk(Cplx(-b), zero, 2, 2, 1, Cplx(-b / 2, h)));
        a1.legs.push_back(mk(zero, mic, 2, 1, 2, Cplx(h, -c / 2)));
        a1.legs.push_back(mk(mic, zero, 1, 2, 1, Cplx(h, -c / 2)));
        a1.legs.push_back(mk(zero, Cplx(-a), 0, 1, 2, Cplx(-a / 2, -hd)));
        cs.alphas.push_back(a1);

        HomologyCycle a2;
        a2.name = "alpha2";
        a2.legs.push_back(mk(Cplx(a), zero, 0, 2, 1, Cplx(a / 2, hd)));
        a2.legs.push_back(mk(zero, pic, 1, 1, 2, Cplx(h, c / 2)));
        a2.legs.push_back(mk(pic, zero, 2, 2, 1, Cplx(h, c / 2)));
        a2.legs.push_back(mk(zero, Cplx(b), 2, 1, 2, Cplx(b / 2, h)));
        a2.legs.push_back(mk(Cplx(b), Cplx(a), 0, 2, 2, Cplx((a + b) / 2, h)));
        cs.alphas.push_back(a2);

        // Intersection numbers of the raw paths: alpha1 crosses both the
        // [-1,-b] cut and the [-a,a] cut once, alpha2 only crosses [-a,a]
        // (alpha1.beta1 = 1, alpha1.beta2 = -1, alpha2.beta2 = 1).  The
        // combinations a1 = alpha1 + alpha2, a2 = alpha2 make the basis
        // canonical with Im B positive definite.
        cs.a_comb = {{1, 1}, {0, 1}};
    } else {
        cs.g = 1;
        // cuts: [-b,b] joins 0-1; [-1,-a] and [a,1] join 0-2.  In the
        // touching configuration (a = b = p) the meeting points have all
        // three sheets colliding, branching order 3.
        const bool touching = (cp.case_id == CaseId::II);
        const int me = touching ? 3 : 2;  // order at +-a
        cs.betas.push_back(bank_cycle("beta1", -Real(1), -a, 0, 2, me, h));

        HomologyCycle a1;
        a1.name = "alpha1";
        if (!touching) {
            a1.legs.push_back(mk(Cplx(a), Cplx(b), 0, 2, 2, Cplx((a + b) / 2, h)));
        }
        a1.legs.push_back(mk(Cplx(b), Cplx(-b), 0, me, me, Cplx(Real(0), h)));
        if (!touching) {
            a1.legs.push_back(mk(Cplx(-b), Cplx(-a), 0, 2, 2, Cplx(-(a + b) / 2, h)));
        }
        a1.legs.push_back(mk(Cplx(-a), Cplx(a), 2, me, me, Cplx(Real(0), h)));
        cs.alphas.push_back(a1);
        cs.a_comb = {{1}};
    }
    return cs;
}

Real tune_p_case1(const Real& a, const Real& tol) {
    const Real pmax = sqrt((1 + a * a) / 3);
    // stay away from the degenerate ends (p = a and p = pmax merge branch points)
    const Real eps = (pmax - a) / 50;
    const Real period_tol = (std::min)(Real(tol / 100), Real(1e-16));

    auto I_of = [&](const Real& p) -> Real {
        CurveParams cp = make_params(a, p);
        BranchPoints bp = branch_points(cp);
        CycleSet cs = build_cycles(cp, bp);
        return Real(period_dN(cp, cs.alphas[1], period_tol).re);
    };

    Real lo = a + eps, hi = pmax - eps;
    Real Ilo = I_of(lo), Ihi = I_of(hi);
    if (Ilo * Ihi > 0)
        throw NoBracket("period real part does not change sign over (a, sqrt((1+a^2)/3))");
    Real p = find_root([&](const Real& x) { return I_of(x); }, lo, hi, Real(1e-30));
    if (abs(I_of(p)) > tol) throw NoBracket("tuning did not reach requested tolerance");
    return p;
}

PeriodData compute_periods(const CurveParams& cp, const CycleSet& cycles,
                           const Real& tol, const Real& abs_tol) {
    PeriodData pd;
    pd.g = cycles.g;
    const Real twopi = 2 * pi_value();
    std::vector<Cplx> alphaP;
    for (const HomologyCycle& cyc : cycles.alphas) {
        Cplx P = period_dN(cp, cyc, tol);
        pd.raw_periods.push_back(P);
        if (abs(P.re) > abs_tol)
            throw RealnessViolation("alpha period has nonzero real part: " + cyc.name);
        alphaP.push_back(P);
    }
    // tau over the canonical a-cycles: tau_i = (sum_j a_comb[i][j] P_j) / (2 pi i)
    for (int i = 0; i < pd.g; ++i) {
        Real t(0);
        for (int j = 0; j < pd.g; ++j) t += cycles.a_comb[i][j] * alphaP[j].im;
        pd.tau.push_back(t / twopi);
    }
    for (const HomologyCycle& cyc : cycles.betas) {
        Cplx P = period_dN(cp, cyc, tol);
        pd.raw_periods.push_back(P);
        if (abs(P.re) > abs_tol)
            throw RealnessViolation("beta period has nonzero real part: " + cyc.name);
        // omega = -P / (2 pi i), real part = -Im(P) / (2 pi)
        pd.omega.push_back(-P.im / twopi);
    }
    return pd;
}

}  // namespace hpsurf
