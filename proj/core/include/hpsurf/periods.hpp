// Homology cycles and periods of the differential dN = h dz.
//
// Cycles are realized as chains of straight legs with a germ label per leg.
// A leg may start or end at a branch point; the substitution
//     z(u) = E + (A - E) u^m,   u in (0, 1],
// with m the branching order of the tracked germ at the endpoint E makes the
// integrand analytic in u on the closed interval, so plain Gauss-Legendre
// panels converge fast and never evaluate at the branch point itself.
//
// The germ on each leg is anchored by analytic continuation from the real
// base point (where the labels h0 > h1 > h2 are defined) along a cut-free
// path: base -> approach -> anchor.  Approaching a cut from above or below
// selects the corresponding boundary value.
#pragma once

#include "hpsurf/curve.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpsurf {

struct CycleLeg {
    Cplx z0, z1;   // endpoints; may be branch points of the tracked germ
    int label = 0; // which sheet's germ is integrated along this leg
    int m0 = 1;    // branching order of the germ at z0 (1 = regular)
    int m1 = 1;    // branching order of the germ at z1
    Cplx approach; // reached from the base point by a straight cut-free segment
    Real anchor_t = Real(1) / 2;  // anchor = z0 + anchor_t (z1 - z0)
};

struct HomologyCycle {
    std::string name;  // "alpha1", "beta2", ...
    std::vector<CycleLeg> legs;
    bool involution = true;  // projection covers its image exactly twice
};

struct CycleSet {
    int g = 1;
    std::vector<HomologyCycle> alphas;  // size g
    std::vector<HomologyCycle> betas;   // size g
    // The raw alpha paths above are convenient to integrate but are not always
    // part of a canonical homology basis.  A canonical basis (a_i . b_j =
    // delta_ij, a_i . a_j = b_i . b_j = 0) is obtained by keeping the betas and
    // taking integer combinations a_i = sum_j a_comb[i][j] alpha_j.  Periods
    // over a_i are the same combinations of the raw alpha periods.
    std::vector<std::vector<int>> a_comb;  // g x g, unimodular
};

struct PeriodData {
    int g = 1;
    std::vector<Real> omega;      // omega_i = -period(beta_i) / (2 pi i)
    std::vector<Real> tau;        // tau_i   =  period(alpha_i) / (2 pi i)
    std::vector<Cplx> raw_periods;  // alphas then betas, pre-realness
};

struct ClosureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RealnessViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoBracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integral of the labeled germ over one leg (endpoint-substituted panels).
Cplx leg_integral(const CurveParams& cp, const CycleLeg& leg, const Real& tol);

// Arbitrary fiber integrand f(z, h) integrated against dz along the leg's
// tracked germ; leg_integral is the special case f(z, h) = h.  The integrand
// must stay integrable at branch-point endpoints after the u-substitution
// (pole order at most m-1 in the local parameter).
using FiberIntegrand = std::function<Cplx(const Cplx&, const Cplx&)>;
Cplx leg_integral_f(const CurveParams& cp, const CycleLeg& leg, const FiberIntegrand& f,
                    const Real& tol);

// Sum of leg_integral_f over a closed chain.
Cplx period_f(const CurveParams& cp, const HomologyCycle& cycle, const FiberIntegrand& f,
              const Real& tol);

// Germ samples of one endpoint walk, for integrals whose integrand also
// depends on a running antiderivative.  Nodes run from the anchor (u = 1)
// toward the endpoint E with  z = E + dir u^m; `w` are du-weights, and
//   int_A^E f(z, h) dz = -dir * ( sum_i m u_i^(m-1) f(z_i, h_i) w_i + tail ),
// where the tail over [0, u_min] extrapolates the analytic combination
// u^(m-1) f through the samples nearest u_min * 2^j (walk_integral does both).
struct WalkData {
    std::vector<Real> u;  // descending from 1; the anchor node carries w = 0
    std::vector<Cplx> z;
    std::vector<Cplx> h;  // tracked germ value (unscaled)
    std::vector<Real> w;
    Cplx dir;
    int m = 1;
    Real u_min;
};
BranchTriple leg_anchor_triple(const CurveParams& cp, const CycleLeg& leg);
WalkData walk_samples(const CurveParams& cp, const BranchTriple& anchor_triple, const Cplx& A,
                      const Cplx& E, int m, int label, const Real& tol, int nsub);
Cplx walk_integral(const WalkData& wd, const FiberIntegrand& f);
// Same, with the integrand already evaluated at the samples (vals[i] at node i).
Cplx walk_integral_values(const WalkData& wd, const std::vector<Cplx>& vals);

// Homology basis adapted to the cut layout of the case.
CycleSet build_cycles(const CurveParams& cp, const BranchPoints& bp);

// Period of dN = h dz over the cycle, germ-tracked.
Cplx period_dN(const CurveParams& cp, const HomologyCycle& cycle, const Real& tol);

// Case-defining parameter choice for two disjoint hard intervals:
// finds p in (a, sqrt((1+a^2)/3)) making Re(period over alpha2) vanish.
Real tune_p_case1(const Real& a, const Real& tol);

// Assemble omega / tau from the cycle periods; every raw period of dN must
// be purely imaginary (realness defect = |Re|) within abs_tol.
PeriodData compute_periods(const CurveParams& cp, const CycleSet& cycles,
                           const Real& tol, const Real& abs_tol);

}  // namespace hpsurf
