#include "hpsurf/periods.hpp"

#include <doctest.h>

using namespace hpsurf;

namespace {
const Real kTol("1e-28");

Real dist(const Cplx& x, const Cplx& y) { return abs(x - y); }
}  // namespace

TEST_CASE("one pair of cycles when the hard intervals touch or overlap the soft one") {
    CurveParams cp3 = make_params(Real(9) / 10);
    CycleSet cs3 = build_cycles(cp3, branch_points(cp3));
    CHECK(cs3.g == 1);
    CHECK(cs3.alphas.size() == 1);
    CHECK(cs3.betas.size() == 1);

    CurveParams cp1 = make_params(Real(1) / 2, Real(6) / 10);
    CycleSet cs1 = build_cycles(cp1, branch_points(cp1));
    CHECK(cs1.g == 2);
    CHECK(cs1.alphas.size() == 2);
    CHECK(cs1.betas.size() == 2);
}

TEST_CASE("genus-one periods: omega = tau = 1/2 in both configurations") {
    Cplx pi_i(Real(0), pi_value());
    for (int which = 0; which < 2; ++which) {
        CurveParams cp = which ? make_params(sqrt(Real(1) / 2)) : make_params(Real(9) / 10);
        CycleSet cs = build_cycles(cp, branch_points(cp));
        Cplx Pb = period_dN(cp, cs.betas[0], kTol);
        Cplx Pa = period_dN(cp, cs.alphas[0], kTol);
        // beta period -2 pi i * (1/2), alpha period +2 pi i * (1/2)
        CHECK(dist(Pb, Cplx(Real(0)) - pi_i) < Real("1e-25"));
        CHECK(dist(Pa, pi_i) < Real("1e-25"));

        PeriodData pd = compute_periods(cp, cs, kTol, Real("1e-24"));
        CHECK(pd.g == 1);
        CHECK(abs(pd.omega[0] - Real(1) / 2) < Real("1e-25"));
        CHECK(abs(pd.tau[0] - Real(1) / 2) < Real("1e-25"));
        for (const Cplx& P : pd.raw_periods) CHECK(abs(P.re) < Real("1e-25"));
    }
}

TEST_CASE("the two hard-interval cycles account for the full residue at infinity") {
    // ccw loops around [-1,-a] and [a,1] sum to 2 pi i; the beta orientation
    // (which makes omega positive) is clockwise, so the built-in cycle and
    // its mirror sum to -2 pi i.
    CurveParams cp = make_params(Real(9) / 10);
    BranchPoints bp = branch_points(cp);
    CycleSet cs = build_cycles(cp, bp);

    HomologyCycle mirror;  // same convention around [a, 1]
    mirror.name = "beta1_mirror";
    {
        CycleLeg up;
        up.z0 = Cplx(cp.a);
        up.z1 = Cplx(Real(1));
        up.label = 0;
        up.m0 = 2;
        up.m1 = 2;
        up.approach = Cplx((cp.a + 1) / 2, Real(1) / 5);
        CycleLeg dn = up;
        dn.z0 = up.z1;
        dn.z1 = up.z0;
        dn.approach = conj(up.approach);
        mirror.legs = {up, dn};
    }
    Cplx sum = period_dN(cp, cs.betas[0], kTol) + period_dN(cp, mirror, kTol);
    Cplx expect(Real(0), -2 * pi_value());
    CHECK(dist(sum, expect) < Real("1e-25"));
}

TEST_CASE("disjoint-interval configuration: 2 omega1 + omega2 = 2 and tau1 = -tau2") {
    // holds for every p in the admissible window, tuned or not
    CurveParams cp = make_params(Real(1) / 2, Real(6) / 10);
    CycleSet cs = build_cycles(cp, branch_points(cp));
    PeriodData pd = compute_periods(cp, cs, kTol, Real(1));  // alpha re parts nonzero pre-tuning
    CHECK(pd.g == 2);
    CHECK(abs(2 * pd.omega[0] + pd.omega[1] - 2) < Real("1e-24"));
    CHECK(abs(pd.tau[0] + pd.tau[1]) < Real("1e-24"));
    CHECK(pd.omega[0] > Real(1) / 2);
    CHECK(pd.omega[0] < 1);

    // with a tight realness gate the untuned alpha periods must be rejected
    CHECK_THROWS_AS(compute_periods(cp, cs, kTol, Real("1e-20")), RealnessViolation);
}

TEST_CASE("parameter tuning picks the single-valued configuration") {
    Real a(Real(1) / 2);
    Real p = tune_p_case1(a, Real("1e-8"));
    CHECK(p > a);
    CHECK(p < Real("0.6454972"));
    // regression constant, frozen from the tuning oracle
    CHECK(abs(p - Real("0.562558084205668602880689804699681")) < Real("1e-12"));

    CurveParams cp = make_params(a, p);
    CycleSet cs = build_cycles(cp, branch_points(cp));
    PeriodData pd = compute_periods(cp, cs, kTol, Real("1e-14"));
    CHECK(abs(2 * pd.omega[0] + pd.omega[1] - 2) < Real("1e-24"));
    CHECK(abs(pd.tau[0] + pd.tau[1]) < Real("1e-14"));
    for (const Cplx& P : pd.raw_periods) CHECK(abs(P.re) < Real("1e-14"));
}

TEST_CASE("periods are invariant under deformation of the realization") {
    CurveParams cp = make_params(Real(9) / 10);
    CycleSet cs = build_cycles(cp, branch_points(cp));
    Cplx P1 = period_dN(cp, cs.betas[0], kTol);

    HomologyCycle def = cs.betas[0];  // move anchors and approach points
    for (CycleLeg& leg : def.legs) {
        leg.anchor_t = Real(3) / 10;
        leg.approach = leg.approach + Cplx(Real(1) / 50, Real(0)) +
                       (leg.approach.im > 0 ? Cplx(Real(0), Real(1) / 10)
                                            : Cplx(Real(0), -Real(1) / 10));
    }
    Cplx P2 = period_dN(cp, def, kTol);
    CHECK(dist(P1, P2) < Real("1e-25"));
}

TEST_CASE("broken chains are rejected") {
    CurveParams cp = make_params(Real(9) / 10);
    CycleSet cs = build_cycles(cp, branch_points(cp));
    HomologyCycle broken = cs.betas[0];
    broken.legs[1].z0 = broken.legs[1].z0 + Cplx(Real(1) / 10);
    CHECK_THROWS_AS(period_dN(cp, broken, kTol), ClosureFailure);
}
