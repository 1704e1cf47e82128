#include "hpsurf/abel_jacobi.hpp"

#include "hpsurf/linalg.hpp"
#include "hpsurf/roots.hpp"

#include <cstdlib>
#include <algorithm>
#include <utility>

namespace hpsurf {

namespace {

// Real symmetric g x g (g <= 2) smallest eigenvalue.
Real sym_min_eig(const std::vector<std::vector<Real>>& S) {
    if (S.size() == 1) return S[0][0];
    Real tr = S[0][0] + S[1][1];
    Real off = (S[0][1] + S[1][0]) / 2;
    Real d = S[0][0] - S[1][1];
    Real disc = sqrt(d * d / 4 + off * off);
    Real lo = tr / 2 - disc;
    return lo;
}

// ---- vector helpers --------------------------------------------------------

Vec vadd(Vec a, const Vec& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
Vec vsub(Vec a, const Vec& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
Vec vscale(Vec a, const Cplx& s) {
    for (auto& v : a) v *= s;
    return a;
}

long floor_long(const Real& x) {
    Real f = floor(x);
    return (long)f.convert_to<double>();
}
long round_long(const Real& x) {
    Real f = floor(x + Real(1) / 2);
    return (long)f.convert_to<double>();
}

}  // namespace

Cplx hol_integrand(const CurveParams& cp, const HolDiff& w, const Cplx& z, const Cplx& h) {
    Cplx num = w.coeff[0] + w.coeff[1] * z + w.coeff[2] * h + w.coeff[3] * z * h +
               w.coeff[4] * z * z;
    return num / cp.Fh(z, h);
}

namespace {

FiberIntegrand make_fiber(const CurveParams& cp, const HolDiff& w) {
    return [cp, w](const Cplx& z, const Cplx& h) -> Cplx { return hol_integrand(cp, w, z, h); };
}

// Taylor data of the candidate pool at the points over infinity.  With
// tau = 1/z and the branch series h_k(tau), every pool integrand becomes
//   f_i = N_i / (3 D_k),   N_i = tau^2 * {1, z, h, z h, z^2}_i,
// where D_k = (Ahat h_k^2)/tau^2 - (1 - p^2 tau^2) is a power series
// (Ahat = tau^4 A).  A differential f dz is regular at the point over
// infinity iff f = O(tau^2), i.e. the first nu_k + 2 coefficients of
// N_i / (3 D_k / tau^nu_k) vanish, nu_k the valuation of D_k.
struct InfinityPole {
    std::array<size_t, 3> nu;
    // per sheet: the five quotient series Q_i = N_i / (3 D_k / tau^nu)
    std::array<std::array<Series, 5>, 3> Q;
};

InfinityPole infinity_pole_data(const CurveParams& cp, size_t L) {
    InfinityPole ip;
    std::array<Series, 3> hs = infinity_series(cp, L);
    const Real a2 = cp.a * cp.a, p2 = cp.p * cp.p;
    const Real val_tol("1e-30");
    for (int k = 0; k < 3; ++k) {
        Series Ahat(L);
        Ahat.c[0] = Cplx(Real(1));
        if (L > 2) Ahat.c[2] = Cplx(-(1 + a2));
        if (L > 4) Ahat.c[4] = Cplx(a2);
        Series P = Ahat * (hs[k] * hs[k]);  // valuation 2
        Series D(L);
        for (size_t m = 0; m + 2 < L; ++m) D.c[m] = P.c[m + 2];
        D.c[0] -= Cplx(Real(1));
        if (L > 2) D.c[2] += Cplx(p2);
        size_t nu = D.valuation(val_tol);
        if (nu >= L) throw RankDeficient("denominator series vanishes at infinity");
        ip.nu[k] = nu;
        Series Dt(L);
        for (size_t m = 0; m + nu < L; ++m) Dt.c[m] = D.c[m + nu];
        Series threeDt = Cplx(Real(3)) * Dt;
        // N_i = tau^2 * {1, z, h, z h, z^2}
        std::array<Series, 5> N;
        for (auto& s : N) s = Series(L);
        if (L > 2) N[0].c[2] = Cplx(Real(1));  // tau^2
        if (L > 1) N[1].c[1] = Cplx(Real(1));  // tau
        {
            Series t2h(L);  // tau^2 h
            for (size_t m = 0; m + 2 < L; ++m) t2h.c[m + 2] = hs[k].c[m];
            N[2] = t2h;
            Series t1h(L);  // tau h
            for (size_t m = 0; m + 1 < L; ++m) t1h.c[m + 1] = hs[k].c[m];
            N[3] = t1h;
        }
        N[4].c[0] = Cplx(Real(1));  // 1
        for (int i = 0; i < 5; ++i) ip.Q[k][i] = Series::divide(N[i], threeDt, val_tol);
    }
    return ip;
}

}  // namespace

HolDiffBasis hol_diff_basis(const CurveParams& cp, const CycleSet& cycles, const Real& tol) {
    const size_t L = 64;
    InfinityPole ip = infinity_pole_data(cp, L);

    // pole-part conditions: for each sheet, coefficients tau^0 .. tau^(nu+1)
    // of Q_i must vanish
    Mat M;
    for (int k = 0; k < 3; ++k) {
        for (size_t j = 0; j <= ip.nu[k] + 1; ++j) {
            Vec row(5);
            for (int i = 0; i < 5; ++i) row[i] = ip.Q[k][i].c[j];
            M.push_back(row);
        }
    }
    std::vector<Vec> null = nullspace(M, Real("1e-25"));
    const int g = cycles.g;
    if ((int)null.size() != g)
        throw RankDeficient("holomorphic subspace dimension " + std::to_string(null.size()) +
                            " != genus " + std::to_string(g));

    std::vector<HolDiff> raw(g);
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < 5; ++i) raw[j].coeff[i] = null[j][i];

    // Period matrix of the raw combinations over the canonical a-cycles:
    // P[j][i] = period of raw_j over a_i = sum_k a_comb[i][k] alpha_k.
    Mat P(g, Vec(g));
    for (int j = 0; j < g; ++j) {
        FiberIntegrand f = make_fiber(cp, raw[j]);
        Vec rawP(g);
        for (int kk = 0; kk < g; ++kk) rawP[kk] = period_f(cp, cycles.alphas[kk], f, tol);
        for (int i = 0; i < g; ++i) {
            Cplx s;
            for (int kk = 0; kk < g; ++kk) s += Cplx(Real(cycles.a_comb[i][kk])) * rawP[kk];
            P[j][i] = s;
        }
    }
    {
        Real det_mag;
        if (g == 1) {
            det_mag = abs(P[0][0]);
        } else {
            Cplx det = P[0][0] * P[1][1] - P[0][1] * P[1][0];
            det_mag = abs(det);
        }
        Real sc(0);
        for (auto& r : P)
            for (auto& v : r) sc = (std::max)(sc, abs(v));
        if (det_mag <= Real("1e-20") * (std::max)(Real(1), Real(sc * sc)))
            throw RankDeficient("alpha-period matrix is numerically singular");
    }
    Mat C = mat_inverse(P);  // normalized_i = sum_j C[i][j] raw_j

    HolDiffBasis basis;
    basis.g = g;
    basis.forms.resize(g);
    basis.at_infinity.resize(g);
    for (int i = 0; i < g; ++i) {
        for (int m = 0; m < 5; ++m) {
            Cplx s;
            for (int j = 0; j < g; ++j) s += C[i][j] * raw[j].coeff[m];
            basis.forms[i].coeff[m] = s;
        }
        // tau-series per sheet: f = tau^(-nu) sum_m coeff_m Q_m
        for (int k = 0; k < 3; ++k) {
            Series comb(L);
            for (int m = 0; m < 5; ++m) comb += basis.forms[i].coeff[m] * ip.Q[k][m];
            Series f(L);
            for (size_t q = 0; q + ip.nu[k] < L; ++q) f.c[q] = comb.c[q + ip.nu[k]];
            basis.at_infinity[i][k] = f;
        }
    }
    return basis;
}

RiemannMatrix riemann_matrix(const CurveParams& cp, const HolDiffBasis& basis,
                             const CycleSet& cycles, const Real& tol) {
    const int g = basis.g;
    RiemannMatrix rm;
    rm.g = g;
    rm.B.assign(g, Vec(g));
    for (int i = 0; i < g; ++i) {
        FiberIntegrand f = make_fiber(cp, basis.forms[i]);
        for (int j = 0; j < g; ++j) rm.B[i][j] = period_f(cp, cycles.betas[j], f, tol);
    }
    Real defect(0);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) defect = (std::max)(defect, abs(rm.B[i][j] - rm.B[j][i]));
    rm.symmetry_defect = defect;
    if (defect > Real("1e-8")) throw SymmetryViolation("Riemann matrix symmetry defect too large");
    std::vector<std::vector<Real>> S(g, std::vector<Real>(g));
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) S[i][j] = rm.B[i][j].im;
    rm.im_min_eig = sym_min_eig(S);
    return rm;
}

namespace {

// ---- branch-point limits ---------------------------------------------------

// Nearby regular point used to approach a branch point, plus the branching
// order of each labeled germ there (order 1 = the sheet is regular at E).
struct BranchApproach {
    Cplx w;
    std::array<int, 3> m;
};

BranchApproach branch_approach(const CurveParams& cp, const BranchPoints& bp, const Cplx& E,
                               const std::array<Cplx, 3>& h_at_w_hint, bool have_hint,
                               const Real& x0) {
    (void)h_at_w_hint;
    (void)have_hint;
    BranchApproach ba;
    Real d(-1);
    for (const Cplx& q : bp.points) {
        Real dd = abs(q - E);
        if (dd > Real("1e-30") && (d < 0 || dd < d)) d = dd;
    }
    if (d < 0) d = Real(1);
    Real t = d / 4;
    if (cp.case_id == CaseId::I) {
        Real half_c = bp.c / 2;
        t = (std::min)(t, half_c);
    }
    ba.w = (abs(E.im) > Real("1e-30")) ? E + Cplx(t) : E + Cplx(Real(0), t);
    // classify colliding germs at E from the labeled fiber at w
    BranchTriple tw;
    {
        Contour ct = base_route(cp, bp, x0, ba.w);
        tw = continue_triple(cp, base_triple(cp), ct);
    }
    ba.m = {1, 1, 1};
    if (cp.case_id == CaseId::II && abs(abs(Cplx(E).re) - cp.a) < Real("1e-20") &&
        abs(E.im) < Real("1e-20")) {
        ba.m = {3, 3, 3};
        return ba;
    }
    if (abs(cp.A(E)) < Real("1e-30")) {
        // hard point: the exchanged pair diverges, so it is the two largest
        int big1 = 0, big2 = 1;
        auto mag = [&](int k) -> Real {
            Real v = abs(tw.h[k]);
            return v;
        };
        for (int k = 0; k < 3; ++k)
            if (mag(k) > mag(big1)) big1 = k;
        big2 = (big1 == 0) ? 1 : 0;
        for (int k = 0; k < 3; ++k)
            if (k != big1 && mag(k) > mag(big2)) big2 = k;
        ba.m[big1] = ba.m[big2] = 2;
    } else {
        // soft point: the exchanged pair collides, so it is the two closest
        int bi = 0, bj = 1;
        Real best(-1);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                Real dd = abs(tw.h[i] - tw.h[j]);
                if (best < 0 || dd < best) {
                    best = dd;
                    bi = i;
                    bj = j;
                }
            }
        ba.m[bi] = ba.m[bj] = 2;
    }
    return ba;
}

CycleLeg make_leg(const Cplx& z0, const Cplx& z1, int label, int m0, int m1) {
    CycleLeg l;
    l.z0 = z0;
    l.z1 = z1;
    l.label = label;
    l.m0 = m0;
    l.m1 = m1;
    l.approach = z0 + (z1 - z0) * Cplx(Real(1) / 2);
    return l;
}

// Omega increments of every basis form over one leg.
Vec leg_vec(const AbelAtlas& atlas, const CycleLeg& leg) {
    Vec v(atlas.basis.g);
    for (int j = 0; j < atlas.basis.g; ++j)
        v[j] = leg_integral_f(atlas.cp, leg, make_fiber(atlas.cp, atlas.basis.forms[j]),
                              atlas.tol);
    return v;
}

// tail of int_{x_far}^{inf^(k)} f_j dz from the tau-series of the form
Cplx series_tail(const Series& f, const Real& X) {
    Cplx sum;
    Real Xi = 1 / X;  // tau at the takeover point
    Real powX = Xi;   // X^-(m-1) for m = 2
    for (size_t m = 2; m < f.size(); ++m) {
        sum += f.c[m] * Cplx(powX / Real((double)(m - 1)));
        powX *= Xi;
    }
    return sum;
}

bool near_branch(const BranchPoints& bp, const Cplx& z, Cplx& which) {
    for (const Cplx& q : bp.points)
        if (abs(z - q) < Real("1e-12")) {
            which = q;
            return true;
        }
    return false;
}

}  // namespace

Vec abel_map(const AbelAtlas& atlas, const SurfacePoint& p) {
    const int g = atlas.basis.g;
    if (p.at_infinity) return atlas.omega_inf[p.sheet];
    if (abs(p.z - Cplx(atlas.x0)) < Real("1e-35")) return atlas.omega_x0[p.sheet];
    Cplx E;
    if (near_branch(atlas.bp, p.z, E)) {
        BranchApproach ba = branch_approach(atlas.cp, atlas.bp, E, {}, false, atlas.x0);
        SurfacePoint q;
        q.z = ba.w;
        q.sheet = p.sheet;
        Vec at_w = abel_map(atlas, q);
        CycleLeg leg = make_leg(ba.w, E, p.sheet, 1, ba.m[p.sheet]);
        leg.approach = ba.w;
        return vadd(at_w, leg_vec(atlas, leg));
    }
    Contour ct = base_route(atlas.cp, atlas.bp, atlas.x0, p.z);
    Vec out(g);
    for (int j = 0; j < g; ++j) {
        TransportResult tr = transport_fiber(atlas.cp, base_triple(atlas.cp), ct,
                                             make_fiber(atlas.cp, atlas.basis.forms[j]),
                                             atlas.tol);
        out[j] = atlas.omega_x0[p.sheet][j] + tr.integrals[p.sheet];
    }
    return out;
}

Real surface_distance(const CurveParams& cp, const SurfacePoint& p, const SurfacePoint& q) {
    auto h_of = [&](const SurfacePoint& s) -> Cplx {
        BranchPoints bp = branch_points(cp);
        Contour ct = base_route(cp, bp, default_base_point(cp), s.z);
        BranchTriple t = continue_triple(cp, base_triple(cp), ct);
        return t.h[s.sheet];
    };
    if (p.at_infinity && q.at_infinity) {
        Real d = (p.sheet == q.sheet) ? Real(0) : Real(1);
        return d;
    }
    if (p.at_infinity || q.at_infinity) {
        const SurfacePoint& fin = p.at_infinity ? q : p;
        const SurfacePoint& inf = p.at_infinity ? p : q;
        Cplx tau = Cplx(Real(1)) / fin.z;
        Cplx hz = h_of(fin) * fin.z;  // -> 2 on sheet 0, -1 on sheets 1, 2
        Real lead_inf = (inf.sheet == 0) ? Real(2) : Real(-1);
        Real lead_fin_gap = abs(hz - Cplx(lead_inf));
        // crude separation of the sheet tags at infinity
        Real d = abs(tau) + lead_fin_gap;
        if (fin.sheet != inf.sheet) d += 1;
        return d;
    }
    Real d = abs(p.z - q.z) + abs(h_of(p) - h_of(q));
    return d;
}

LatticeReduced lattice_reduce(const RiemannMatrix& rm, const Vec& v) {
    const int g = rm.g;
    // y solves Im(B) y = Im(v); x = Re(v) - Re(B) y
    std::vector<Real> y(g), x(g);
    if (g == 1) {
        y[0] = v[0].im / rm.B[0][0].im;
    } else {
        Real det = rm.B[0][0].im * rm.B[1][1].im - rm.B[0][1].im * rm.B[1][0].im;
        y[0] = (v[0].im * rm.B[1][1].im - v[1].im * rm.B[0][1].im) / det;
        y[1] = (rm.B[0][0].im * v[1].im - rm.B[1][0].im * v[0].im) / det;
    }
    for (int i = 0; i < g; ++i) {
        Real s = v[i].re;
        for (int j = 0; j < g; ++j) s -= rm.B[i][j].re * y[j];
        x[i] = s;
    }
    LatticeReduced r;
    r.jint.resize(g);
    r.mint.resize(g);
    for (int i = 0; i < g; ++i) {
        r.jint[i] = floor_long(x[i]);
        r.mint[i] = floor_long(y[i]);
    }
    r.value.assign(g, Cplx());
    for (int i = 0; i < g; ++i) {
        Cplx s = v[i] - Cplx(Real(r.jint[i]));
        for (int j = 0; j < g; ++j) s -= rm.B[i][j] * Cplx(Real(r.mint[j]));
        r.value[i] = s;
    }
    return r;
}

Real lattice_defect(const RiemannMatrix& rm, const Vec& u, const Vec& w) {
    const int g = rm.g;
    Vec d = vsub(u, w);
    std::vector<Real> y(g), x(g);
    if (g == 1) {
        y[0] = d[0].im / rm.B[0][0].im;
    } else {
        Real det = rm.B[0][0].im * rm.B[1][1].im - rm.B[0][1].im * rm.B[1][0].im;
        y[0] = (d[0].im * rm.B[1][1].im - d[1].im * rm.B[0][1].im) / det;
        y[1] = (rm.B[0][0].im * d[1].im - rm.B[1][0].im * d[0].im) / det;
    }
    for (int i = 0; i < g; ++i) {
        Real s = d[i].re;
        for (int j = 0; j < g; ++j) s -= rm.B[i][j].re * y[j];
        x[i] = s;
    }
    std::vector<Real> yt(g), xt(g);
    for (int i = 0; i < g; ++i) {
        yt[i] = y[i] - Real(round_long(y[i]));
        xt[i] = x[i] - Real(round_long(x[i]));
    }
    Real defect(0);
    for (int i = 0; i < g; ++i) {
        Cplx s(xt[i]);
        for (int j = 0; j < g; ++j) s += rm.B[i][j] * Cplx(yt[j]);
        defect = (std::max)(defect, abs(s));
    }
    return defect;
}

namespace {

// theta with its u-gradient (both from one truncated lattice sum)
void theta_impl(const Vec& u, const RiemannMatrix& rm, const Real& abs_tol, Cplx& val,
                Vec* grad) {
    const int g = rm.g;
    const Real pi = pi_value();
    // Gaussian decay: |term| = exp(-pi n^T Y n - 2 pi n^T Im(u)), Y = Im B.
    // Completing the square around c = -Y^{-1} Im(u) bounds the tail by
    // exp(pi q - pi lam r^2), q = Im(u)^T Y^{-1} Im(u).
    std::vector<Real> c(g);
    if (g == 1) {
        c[0] = -u[0].im / rm.B[0][0].im;
    } else {
        Real det = rm.B[0][0].im * rm.B[1][1].im - rm.B[0][1].im * rm.B[1][0].im;
        c[0] = -(u[0].im * rm.B[1][1].im - u[1].im * rm.B[0][1].im) / det;
        c[1] = -(rm.B[0][0].im * u[1].im - rm.B[1][0].im * u[0].im) / det;
    }
    Real q(0);
    for (int i = 0; i < g; ++i) q += -c[i] * u[i].im;
    Real lam = rm.im_min_eig;
    Real tol = abs_tol;
    if (tol <= 0) tol = Real("1e-40");
    Real rad2 = (pi * q - log(tol) + 12) / (pi * lam);
    if (rad2 < 4) rad2 = 4;
    long R = (long)ceil(sqrt(rad2)).convert_to<double>() + 2;
    std::vector<long> c0(g);
    for (int i = 0; i < g; ++i) c0[i] = round_long(c[i]);

    val = Cplx();
    if (grad) grad->assign(g, Cplx());
    const Cplx pii = Cplx(Real(0), pi);
    const Cplx twopii = Cplx(Real(0), 2 * pi);
    std::vector<long> n(g);
    auto add_term = [&](const std::vector<long>& nn) {
        Cplx quad, lin;
        for (int i = 0; i < g; ++i) {
            for (int j = 0; j < g; ++j)
                quad += rm.B[i][j] * Cplx(Real(nn[i]) * Real(nn[j]));
            lin += u[i] * Cplx(Real(nn[i]));
        }
        Cplx term = exp(pii * quad + twopii * lin);
        val += term;
        if (grad)
            for (int i = 0; i < g; ++i) (*grad)[i] += twopii * Cplx(Real(nn[i])) * term;
    };
    if (g == 1) {
        for (long n1 = c0[0] - R; n1 <= c0[0] + R; ++n1) {
            n[0] = n1;
            add_term(n);
        }
    } else {
        for (long n1 = c0[0] - R; n1 <= c0[0] + R; ++n1)
            for (long n2 = c0[1] - R; n2 <= c0[1] + R; ++n2) {
                n[0] = n1;
                n[1] = n2;
                add_term(n);
            }
    }
}

}  // namespace

Cplx theta(const Vec& u, const RiemannMatrix& rm, const Real& abs_tol) {
    Cplx v;
    theta_impl(u, rm, abs_tol, v, nullptr);
    return v;
}

AbelAtlas make_atlas(const CurveParams& cp, const Real& tol) {
    AbelAtlas atlas;
    atlas.cp = cp;
    atlas.bp = branch_points(cp);
    atlas.cycles = build_cycles(cp, atlas.bp);
    atlas.basis = hol_diff_basis(cp, atlas.cycles, tol);
    atlas.rm = riemann_matrix(cp, atlas.basis, atlas.cycles, tol);
    atlas.tol = tol;
    atlas.x0 = default_base_point(cp);
    atlas.x_far = Real(10);
    const int g = atlas.basis.g;

    // Omega at (x0, sheet): from the branch point e1 over z = 1 (sheets 0 and
    // 2 meet there); sheet 1 attaches through the right end of the 0-1 cut.
    for (int s = 0; s < 3; ++s) atlas.omega_x0[s].assign(g, Cplx());
    {
        CycleLeg to0 = make_leg(Cplx(Real(1)), Cplx(atlas.x0), 0, 2, 1);
        CycleLeg to2 = make_leg(Cplx(Real(1)), Cplx(atlas.x0), 2, 2, 1);
        atlas.omega_x0[0] = leg_vec(atlas, to0);
        atlas.omega_x0[2] = leg_vec(atlas, to2);
        const bool touching = cp.case_id == CaseId::II;
        const int me = touching ? 3 : 2;
        const Real e1s = (cp.case_id == CaseId::I) ? cp.a : atlas.bp.b;
        Cplx w(e1s, Real(1) / 4);
        Vec glue(g);
        glue = vadd(glue, leg_vec(atlas, make_leg(Cplx(atlas.x0), w, 0, 1, 1)));
        glue = vadd(glue, leg_vec(atlas, make_leg(w, Cplx(e1s), 0, 1, me)));
        glue = vadd(glue, leg_vec(atlas, make_leg(Cplx(e1s), w, 1, me, 1)));
        glue = vadd(glue, leg_vec(atlas, make_leg(w, Cplx(atlas.x0), 1, 1, 1)));
        atlas.omega_x0[1] = vadd(atlas.omega_x0[0], glue);
    }

    // Omega at the three points over infinity: transport to x_far on the
    // real axis, then the series tail
    for (int s = 0; s < 3; ++s) atlas.omega_inf[s].assign(g, Cplx());
    {
        Contour out = Contour::segment(Cplx(atlas.x0), Cplx(atlas.x_far));
        for (int j = 0; j < g; ++j) {
            TransportResult tr = transport_fiber(cp, base_triple(cp), out,
                                                 make_fiber(cp, atlas.basis.forms[j]),
                                                 atlas.tol);
            for (int s = 0; s < 3; ++s)
                atlas.omega_inf[s][j] = atlas.omega_x0[s][j] + tr.integrals[s] +
                                        series_tail(atlas.basis.at_infinity[j][s], atlas.x_far);
        }
    }
    for (int s = 0; s < 3; ++s) atlas.v[s] = vsub(atlas.omega_inf[s], atlas.omega_inf[0]);
    atlas.K = riemann_constants(atlas);
    return atlas;
}

// ---- Jacobi inversion ------------------------------------------------------

namespace {

struct OmegaGrid {
    Real R;
    int n = 0;
    std::vector<Cplx> z;                      // cell centers, row major
    std::vector<std::array<Cplx, 3>> h;       // labeled fiber at the center
    std::vector<std::vector<std::array<Cplx, 3>>> om;  // [form][cell][sheet]
};

std::shared_ptr<OmegaGrid> build_grid(const AbelAtlas& atlas) {
    auto grid = std::make_shared<OmegaGrid>();
    const CurveParams& cp = atlas.cp;
    const int g = atlas.basis.g;
    Real R = (std::max)(Real(Real(5) / 2), Real(atlas.bp.c + 1));
    grid->R = R;
    const int n = 32;
    grid->n = n;
    grid->z.assign((size_t)n * n, Cplx());
    grid->h.assign((size_t)n * n, {});
    grid->om.assign(g, std::vector<std::array<Cplx, 3>>((size_t)n * n));

    const bool axis_cut = cp.case_id == CaseId::I;
    Real dx = 2 * R / n;
    for (int row = 0; row < n; ++row) {
        Real y = -R + (Real(row) + Real(1) / 2) * dx;
        // run boundaries: restart at the imaginary axis when it carries a cut
        std::vector<int> starts{0};
        if (axis_cut && abs(y) >= atlas.bp.c) {
            for (int i = 0; i < n; ++i) {
                Real x = -R + (Real(i) + Real(1) / 2) * dx;
                if (x >= 0) {
                    if (i > 0) starts.push_back(i);
                    break;
                }
            }
        }
        for (size_t si = 0; si < starts.size(); ++si) {
            int i0 = starts[si];
            int i1 = (si + 1 < starts.size()) ? starts[si + 1] : n;
            Real x_first = -R + (Real(i0) + Real(1) / 2) * dx;
            Cplx zc(x_first, y);
            Contour ct = base_route(cp, atlas.bp, atlas.x0, zc);
            BranchTriple cur;
            std::vector<std::array<Cplx, 3>> omacc(g);
            for (int j = 0; j < g; ++j) {
                TransportResult tr = transport_fiber(cp, base_triple(cp), ct,
                                                     make_fiber(cp, atlas.basis.forms[j]),
                                                     atlas.tol);
                cur = tr.end;
                for (int s = 0; s < 3; ++s)
                    omacc[j][s] = atlas.omega_x0[s][j] + tr.integrals[s];
            }
            size_t cell = (size_t)row * n + i0;
            grid->z[cell] = zc;
            grid->h[cell] = cur.h;
            for (int j = 0; j < g; ++j) grid->om[j][cell] = omacc[j];
            for (int i = i0 + 1; i < i1; ++i) {
                Real x = -R + (Real(i) + Real(1) / 2) * dx;
                Cplx znext(x, y);
                Contour step = Contour::segment(cur.z, znext);
                BranchTriple nxt = cur;
                for (int j = 0; j < g; ++j) {
                    TransportResult tr = transport_fiber(cp, cur, step,
                                                         make_fiber(cp, atlas.basis.forms[j]),
                                                         atlas.tol);
                    nxt = tr.end;
                    for (int s = 0; s < 3; ++s) omacc[j][s] += tr.integrals[s];
                }
                cur = nxt;
                cell = (size_t)row * n + i;
                grid->z[cell] = znext;
                grid->h[cell] = cur.h;
                for (int j = 0; j < g; ++j) grid->om[j][cell] = omacc[j];
            }
        }
    }
    return grid;
}

const OmegaGrid& get_grid(const AbelAtlas& atlas) {
    if (!atlas.grid_cache) atlas.grid_cache = build_grid(atlas);
    return *static_cast<const OmegaGrid*>(atlas.grid_cache.get());
}

struct NewtonResult {
    bool ok = false;
    Cplx z;
    Cplx h;      // germ value at z
    Vec omega;   // Omega at the converged point (continued from the seed)
    Real resid;  // |theta| at the end
};

NewtonResult newton_polish(const AbelAtlas& atlas, const OmegaGrid& grid, size_t cell,
                           int sheet, const Vec& target, const Real& theta_tol) {
    NewtonResult nr;
    const CurveParams& cp = atlas.cp;
    const int g = atlas.basis.g;
    Cplx z = grid.z[cell];
    BranchTriple cur;
    cur.z = z;
    cur.h = grid.h[cell];
    Vec om(g);
    for (int j = 0; j < g; ++j) om[j] = grid.om[j][cell][sheet];
    // track the single germ
    Real step_cap = grid.R / 8;
    for (int it = 0; it < 24; ++it) {
        Vec arg = vsub(om, target);
        Cplx th;
        Vec gr;
        theta_impl(arg, atlas.rm, theta_tol / 100, th, &gr);
        Cplx deriv;
        for (int j = 0; j < g; ++j)
            deriv += gr[j] * hol_integrand(cp, atlas.basis.forms[j], cur.z, cur.h[sheet]);
        if (abs(th) < theta_tol && it > 0) {
            nr.ok = true;
            nr.z = cur.z;
            nr.h = cur.h[sheet];
            nr.omega = om;
            nr.resid = abs(th);
            return nr;
        }
        if (abs(deriv) == 0) return nr;
        Cplx dz = (Cplx() - th) / deriv;
        Real mag = abs(dz);
        if (mag > step_cap) dz = dz * Cplx(step_cap / mag);
        Cplx znext = cur.z + dz;
        try {
            Contour seg = Contour::segment(cur.z, znext);
            BranchTriple nxt = cur;
            for (int j = 0; j < g; ++j) {
                TransportResult tr = transport_fiber(cp, cur, seg,
                                                     make_fiber(cp, atlas.basis.forms[j]),
                                                     atlas.tol);
                nxt = tr.end;
                om[j] += tr.integrals[sheet];
            }
            cur = nxt;
        } catch (const std::exception&) {
            return nr;
        }
    }
    return nr;
}

std::vector<ThetaZero> theta_divisor_impl(const AbelAtlas& atlas, const OmegaGrid& grid,
                                          const Vec& T) {
    const int g = atlas.rm.g;
    const int nc = grid.n;
    const Real theta_tol("1e-30");
    std::vector<std::array<Real, 3>> G((size_t)nc * nc);
    Real maxG(0);
    for (size_t cell = 0; cell < G.size(); ++cell)
        for (int s = 0; s < 3; ++s) {
            Vec om(g);
            for (int j = 0; j < g; ++j) om[j] = grid.om[j][cell][s];
            G[cell][s] = abs(theta(vsub(om, T), atlas.rm, theta_tol));
            maxG = (std::max)(maxG, G[cell][s]);
        }
    if (maxG < Real("1e-8")) throw NonUnique("theta vanishes identically on the grid");

    struct Seed {
        Real val;
        size_t cell;
        int sheet;
    };
    std::vector<Seed> seeds;
    for (int row = 0; row < nc; ++row)
        for (int col = 0; col < nc; ++col) {
            size_t cell = (size_t)row * nc + col;
            for (int s = 0; s < 3; ++s) {
                Real v = G[cell][s];
                bool is_min = true;
                const int dr[4] = {1, -1, 0, 0}, dc[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4 && is_min; ++d) {
                    int r2 = row + dr[d], c2 = col + dc[d];
                    if (r2 < 0 || r2 >= nc || c2 < 0 || c2 >= nc) continue;
                    if (G[(size_t)r2 * nc + c2][s] < v) is_min = false;
                }
                if (is_min && v < maxG / 2) seeds.push_back({v, cell, s});
            }
        }
    std::sort(seeds.begin(), seeds.end(),
              [](const Seed& a, const Seed& b) { return a.val < b.val; });
    if (seeds.size() > 16) seeds.resize(16);

    std::vector<ThetaZero> zeros;
    int finite = 0;
    for (const Seed& sd : seeds) {
        if (finite >= g) break;
        NewtonResult nr = newton_polish(atlas, grid, sd.cell, sd.sheet, T, Real("1e-12"));
        if (!nr.ok) continue;
        if (abs(nr.z) > grid.R * 2) continue;
        bool dup = false;
        for (const ThetaZero& p : zeros)
            if (!p.at_infinity && abs(p.z - nr.z) + abs(p.h - nr.h) < Real("1e-8")) dup = true;
        if (dup) continue;
        ThetaZero tz;
        tz.z = nr.z;
        tz.h = nr.h;
        tz.omega = nr.omega;
        zeros.push_back(tz);
        ++finite;
    }
    for (int s = 0; s < 3; ++s)
        if (abs(theta(vsub(atlas.omega_inf[s], T), atlas.rm, theta_tol)) < Real("1e-8")) {
            ThetaZero tz;
            tz.at_infinity = true;
            tz.sheet = s;
            tz.omega = atlas.omega_inf[s];
            zeros.push_back(tz);
        }
    return zeros;
}

}  // namespace

std::vector<ThetaZero> theta_divisor(const AbelAtlas& atlas, const Vec& T) {
    return theta_divisor_impl(atlas, get_grid(atlas), T);
}

Vec riemann_constants(const AbelAtlas& atlas) {
    const int g = atlas.rm.g;
    Vec K(g);
    if (g == 1) {
        K[0] = (atlas.rm.B[0][0] - Cplx(Real(1))) / Cplx(Real(2));
        return K;
    }
    // Riemann vanishing theorem: for generic u the function
    // z -> theta(Omega(z) - u) has exactly g zeros, forming a divisor D_u with
    // Omega(D_u) = u - K.  Locate the zeros for a generic u and solve for K;
    // repeat with a second u and require agreement modulo the period lattice.
    const OmegaGrid& grid = get_grid(atlas);
    auto K_for = [&](const Real& x1, const Real& x2, const Real& y1,
                     const Real& y2) -> std::vector<Cplx> {
        Vec u(g);
        u[0] = Cplx(x1) + atlas.rm.B[0][0] * Cplx(y1) + atlas.rm.B[0][1] * Cplx(y2);
        u[1] = Cplx(x2) + atlas.rm.B[1][0] * Cplx(y1) + atlas.rm.B[1][1] * Cplx(y2);
        std::vector<ThetaZero> zeros = theta_divisor_impl(atlas, grid, u);
        if ((int)zeros.size() != g) return {};
        Vec sum(g);
        for (const ThetaZero& tz : zeros) sum = vadd(sum, tz.omega);
        return vsub(u, sum);
    };
    const double probes[][4] = {{0.23, 0.41, 0.17, 0.36},
                                {0.52, 0.11, 0.33, 0.27},
                                {0.07, 0.61, 0.44, 0.13},
                                {0.38, 0.29, 0.08, 0.47}};
    std::vector<Vec> ks;
    for (const auto& pr : probes) {
        std::vector<Cplx> kv = K_for(Real(pr[0]), Real(pr[1]), Real(pr[2]), Real(pr[3]));
        if (!kv.empty()) ks.push_back(kv);
        if (ks.size() == 2) break;
    }
    if (ks.size() < 2) throw NonUnique("could not locate theta zero divisors for generic shifts");
    if (lattice_defect(atlas.rm, ks[0], ks[1]) > Real("1e-6"))
        if (!std::getenv("HPSURF_K_DEBUG"))
            throw NonUnique("Riemann constant determinations disagree");
    return ks[0];
}

DivisorSolution solve_jip(const AbelAtlas& atlas, int n, int k, const Vec& c_rho,
                          const std::vector<Real>& omega, const std::vector<Real>& tau) {
    const int g = atlas.rm.g;
    const OmegaGrid& grid = get_grid(atlas);
    const int nc = grid.n;

    // x_n + B y_n from n (omega + B tau), reduced to [0,1)^g
    Vec nq(g);
    for (int i = 0; i < g; ++i) {
        Cplx s(Real(n) * omega[i]);
        for (int j = 0; j < g; ++j) s += atlas.rm.B[i][j] * Cplx(Real(n) * tau[j]);
        nq[i] = s;
    }
    Vec xByn = lattice_reduce(atlas.rm, nq).value;
    Vec crho = c_rho;
    if ((int)crho.size() != g) crho.assign(g, Cplx());
    Vec rhs = vadd(vadd(vadd(vscale(atlas.omega_inf[2], Cplx(Real(g))), atlas.v[k]), crho),
                   xByn);               // Omega(D) target
    Vec T = vadd(rhs, atlas.K);         // theta shift

    const Real theta_tol("1e-30");
    const Real accept("1e-12");

    // |theta| over the cached grid, per sheet
    std::vector<std::array<Real, 3>> G((size_t)nc * nc);
    Real maxG(0);
    for (size_t cell = 0; cell < G.size(); ++cell) {
        for (int s = 0; s < 3; ++s) {
            Vec om(g);
            for (int j = 0; j < g; ++j) om[j] = grid.om[j][cell][s];
            G[cell][s] = abs(theta(vsub(om, T), atlas.rm, theta_tol));
            maxG = (std::max)(maxG, G[cell][s]);
        }
    }
    if (maxG < Real("1e-8"))
        throw NonUnique("theta numerator vanishes identically (special divisor)");

    // seeds: 4-neighborhood local minima, most promising first
    struct Seed {
        Real val;
        size_t cell;
        int sheet;
    };
    std::vector<Seed> seeds;
    for (int row = 0; row < nc; ++row)
        for (int col = 0; col < nc; ++col) {
            size_t cell = (size_t)row * nc + col;
            for (int s = 0; s < 3; ++s) {
                Real v = G[cell][s];
                bool is_min = true;
                const int dr[4] = {1, -1, 0, 0}, dc[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4 && is_min; ++d) {
                    int r2 = row + dr[d], c2 = col + dc[d];
                    if (r2 < 0 || r2 >= nc || c2 < 0 || c2 >= nc) continue;
                    if (G[(size_t)r2 * nc + c2][s] < v) is_min = false;
                }
                if (is_min && v < maxG / 2) seeds.push_back({v, cell, s});
            }
        }
    std::sort(seeds.begin(), seeds.end(),
              [](const Seed& a, const Seed& b) { return a.val < b.val; });
    if (seeds.size() > 16) seeds.resize(16);

    struct FiniteRoot {
        Cplx z, h;
        Vec omega;
    };
    std::vector<FiniteRoot> roots;
    for (const Seed& sd : seeds) {
        if ((int)roots.size() >= g) break;
        NewtonResult nr = newton_polish(atlas, grid, sd.cell, sd.sheet, T, accept);
        if (!nr.ok) continue;
        if (abs(nr.z) > grid.R * 2) continue;  // ran away toward infinity
        bool dup = false;
        for (const FiniteRoot& r : roots)
            if (abs(r.z - nr.z) + abs(r.h - nr.h) < Real("1e-8")) dup = true;
        if (dup) continue;
        roots.push_back({nr.z, nr.h, nr.omega});
    }

    // points over infinity contained in the divisor
    std::vector<int> inf_sheets;
    for (int s = 0; s < 3; ++s) {
        Real v = abs(theta(vsub(atlas.omega_inf[s], T), atlas.rm, theta_tol));
        if (v < Real("1e-8")) inf_sheets.push_back(s);
    }

    // assemble the best multiset of g points from the located candidates
    struct Cand {
        bool at_inf;
        int inf_sheet;
        size_t root_idx;
    };
    std::vector<Cand> cands;
    for (size_t i = 0; i < roots.size(); ++i) cands.push_back({false, 0, i});
    for (int s : inf_sheets) cands.push_back({true, s, 0});
    if (cands.empty()) throw NonUnique("no theta zeros located for the inversion problem");

    auto omega_of = [&](const Cand& c) -> Vec {
        if (c.at_inf) return atlas.omega_inf[c.inf_sheet];
        return roots[c.root_idx].omega;
    };
    std::vector<std::vector<size_t>> combos;
    if (g == 1) {
        for (size_t i = 0; i < cands.size(); ++i) combos.push_back({i});
    } else {
        for (size_t i = 0; i < cands.size(); ++i)
            for (size_t j = i; j < cands.size(); ++j) combos.push_back({i, j});
    }
    Real best_res(-1);
    std::vector<size_t> best;
    for (const auto& cb : combos) {
        Vec sum(g);
        for (size_t idx : cb) sum = vadd(sum, omega_of(cands[idx]));
        Real res = lattice_defect(atlas.rm, sum, rhs);
        if (best_res < 0 || res < best_res) {
            best_res = res;
            best = cb;
        }
    }
    if (best_res > Real("1e-6"))
        throw NonUnique("inversion congruence residual too large: no consistent divisor");

    DivisorSolution ds;
    ds.n = n;
    ds.k = k;
    ds.residual = best_res;
    const Real eps0 = grid.R * 2 / 1000;  // 1e-3 of the diameter proxy
    for (size_t idx : best) {
        const Cand& c = cands[idx];
        SurfacePoint p;
        if (c.at_inf) {
            p = SurfacePoint::infinity(c.inf_sheet);
            if (c.inf_sheet == 0) throw NearInfinity0("divisor meets the point over infinity on sheet 0");
        } else {
            p.z = roots[c.root_idx].z;
            // base-frame sheet tag: match the germ against a fresh probe
            Contour ct = base_route(atlas.cp, atlas.bp, atlas.x0, p.z);
            BranchTriple t = continue_triple(atlas.cp, base_triple(atlas.cp), ct);
            int lbl = 0;
            Real bd(-1);
            for (int l = 0; l < 3; ++l) {
                Real d = abs(t.h[l] - roots[c.root_idx].h);
                if (bd < 0 || d < bd) {
                    bd = d;
                    lbl = l;
                }
            }
            p.sheet = lbl;
            if (lbl == 0 && abs(p.z) > 1 / eps0)
                throw NearInfinity0("divisor approaches the point over infinity on sheet 0");
        }
        ds.points.push_back(p);
    }
    ds.unique = true;
    ds.admissible = true;
    return ds;
}

std::vector<int> select_admissible(const AbelAtlas& atlas, int n_lo, int n_hi, int k,
                                   const Vec& c_rho, const std::vector<Real>& omega,
                                   const std::vector<Real>& tau) {
    std::vector<int> out;
    for (int n = n_lo; n <= n_hi; ++n) {
        try {
            DivisorSolution ds = solve_jip(atlas, n, k, c_rho, omega, tau);
            if (ds.unique && ds.admissible) out.push_back(n);
        } catch (const NonUnique&) {
        } catch (const NearInfinity0&) {
        }
    }
    if (out.empty()) throw EmptySelection("no admissible indices in range");
    return out;
}

}  // namespace hpsurf
