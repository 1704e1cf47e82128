#include <doctest.h>

#include <hpsurf/curve.hpp>

using namespace hpsurf;
using boost::multiprecision::abs;

static Real tol_digits(int d) { return boost::multiprecision::pow(Real(10), -d); }

static CurveParams case2() { return make_params(boost::multiprecision::sqrt(Real(1) / 2)); }
static CurveParams case3() { return make_params(Real(9) / 10); }

TEST_CASE("case classification") {
    CHECK(case2().case_id == CaseId::II);
    CHECK(case3().case_id == CaseId::III);
    CHECK(make_params(Real(1) / 2).case_id == CaseId::I);
}

TEST_CASE("fiber values match the independent Cardano oracle (case II, z=2)") {
    // frozen oracle values (50-digit Cardano, sorted descending)
    CurveParams cp = case2();
    BranchTriple t = label_at_base(cp, Real(2));
    CHECK(abs(t.h[0].re - Real("1.1533826006380101259092759051986938")) < tol_digits(30));
    CHECK(abs(t.h[1].re - Real("-0.52892695787482047933726755501854072")) < tol_digits(30));
    CHECK(abs(t.h[2].re - Real("-0.62445564276318964657200835018015311")) < tol_digits(30));
}

TEST_CASE("fiber values match the oracle (case III, z=2)") {
    CurveParams cp = case3();
    BranchTriple t = label_at_base(cp, Real(2));
    CHECK(abs(t.h[0].re - Real("1.189971389373169637221693847951886")) < tol_digits(30));
    CHECK(abs(t.h[1].re - Real("-0.54243230965111655104797301942775678")) < tol_digits(30));
    CHECK(abs(t.h[2].re - Real("-0.64753907972205308617372082852412921")) < tol_digits(30));
}

TEST_CASE("vieta relations hold at random points") {
    for (const CurveParams& cp : {case2(), case3(), make_params(Real(1) / 2)}) {
        // scattered sample points off the real axis and off the cuts
        std::vector<Cplx> pts = {Cplx(Real("0.3"), Real("0.7")), Cplx(Real("-1.4"), Real("0.2")),
                                 Cplx(Real("2.1"), Real("-1.3")), Cplx(Real("0.05"), Real("-0.6"))};
        for (const auto& z : pts) {
            auto h = solve_branches(cp, z);
            Cplx sum = h[0] + h[1] + h[2];
            Cplx pairs = h[0] * h[1] + h[0] * h[2] + h[1] * h[2];
            Cplx prod = h[0] * h[1] * h[2];
            CHECK(hpsurf::abs(sum) < tol_digits(60));
            CHECK(hpsurf::abs(pairs + Cplx(Real(3)) * cp.B2(z) / cp.A(z)) < tol_digits(55));
            CHECK(hpsurf::abs(prod - Cplx(Real(2)) * cp.B1(z) / cp.A(z)) < tol_digits(55));
        }
    }
}

TEST_CASE("discriminant vanishes exactly at the branch points") {
    for (const CurveParams& cp : {case2(), case3()}) {
        BranchPoints bp = branch_points(cp);
        for (const auto& e : bp.points) CHECK(hpsurf::abs(discriminant(cp, e)) < tol_digits(55));
    }
}

TEST_CASE("case II discriminant identity 27 (z^2-1)(z^2-1/2)^2") {
    CurveParams cp = case2();
    std::vector<Cplx> pts = {Cplx(Real("0.37"), Real("1.1")), Cplx(Real(3)), Cplx(Real("-0.8"), Real("-0.3"))};
    for (const auto& z : pts) {
        Cplx lhs = discriminant(cp, z);
        Cplx w = z * z - Cplx(Real(1) / 2);
        Cplx rhs = Cplx(Real(27)) * (z * z - Cplx(Real(1))) * w * w;
        CHECK(hpsurf::abs(lhs - rhs) < tol_digits(55) * (1 + hpsurf::abs(rhs)));
    }
}

TEST_CASE("branch point layout per case") {
    // case II: b = a = p = 1/sqrt(2); six points total
    BranchPoints b2 = branch_points(case2());
    CHECK(abs(b2.b - boost::multiprecision::sqrt(Real(1) / 2)) < tol_digits(60));
    CHECK(b2.c == 0);
    // case III at a = 0.9: frozen oracle b
    BranchPoints b3 = branch_points(case3());
    CHECK(abs(b3.b - Real("0.8824411665237162097545886703894932")) < tol_digits(30));
    CHECK(b3.b > case3().p);
    CHECK(b3.b < case3().a);
    // case I (untuned p = p*): the same linear degeneration applies; tuned p
    // gives b in (a, p); here just check the imaginary pair appears for p<p*
    CurveParams c1 = make_params(Real(1) / 2, Real("0.6"));
    BranchPoints b1 = branch_points(c1);
    CHECK(b1.c > 0);
    CHECK(b1.points.size() == 8);
}

TEST_CASE("infinity coefficients and series agree") {
    for (const CurveParams& cp : {case2(), case3(), make_params(Real(1) / 2, Real("0.55"))}) {
        InfinityCoeffs ic = infinity_coeffs(cp);
        auto ser = infinity_series(cp, 8);
        // sheet 0: 2/z
        CHECK(hpsurf::abs(ser[0].c[1] - Cplx(Real(2))) < tol_digits(55));
        for (int k = 1; k <= 2; ++k) {
            CHECK(hpsurf::abs(ser[k].c[1] + Cplx(Real(1))) < tol_digits(55));
            CHECK(hpsurf::abs(ser[k].c[2] - ic.alpha[k]) < tol_digits(50));
            if (cp.case_id != CaseId::I)
                CHECK(hpsurf::abs(ser[k].c[3] - ic.beta[k]) < tol_digits(50));
        }
    }
}

TEST_CASE("case II/III beta coefficients: frozen oracle values") {
    InfinityCoeffs i2 = infinity_coeffs(case2());
    CHECK(hpsurf::abs(i2.beta[1] - Cplx(Real("-0.21132486540518711774542560974902127"))) < tol_digits(30));
    CHECK(hpsurf::abs(i2.beta[2] - Cplx(Real("-0.78867513459481288225457439025097873"))) < tol_digits(30));
    InfinityCoeffs i3 = infinity_coeffs(case3());
    CHECK(hpsurf::abs(i3.beta[1] - Cplx(Real("-0.2967210193093999907368283765505646"))) < tol_digits(30));
    CHECK(hpsurf::abs(i3.beta[2] - Cplx(Real("-0.90994564735726667592983829011610207"))) < tol_digits(30));
}

TEST_CASE("series evaluation matches direct fiber solve at large z") {
    CurveParams cp = case3();
    auto ser = infinity_series(cp, 14);
    Real x0 = 25;
    BranchTriple t = label_at_base(cp, x0);
    Real tau = 1 / x0;
    for (int k = 0; k < 3; ++k) {
        Cplx acc;
        for (size_t m = ser[k].size(); m-- > 0;) acc = acc * Cplx(tau) + ser[k].c[m];
        CHECK(hpsurf::abs(acc - t.h[k]) < tol_digits(17));
    }
}

TEST_CASE("monodromy: a small loop around a branch point swaps exactly two sheets") {
    CurveParams cp = case2();
    // z = 1 joins sheets 0 and 2 (right-edge hard point)
    BranchTriple start = base_triple(cp);
    Contour to_ring = Contour::segment(start.z, Cplx(Real("1.2")));
    BranchTriple ring = continue_triple(cp, start, to_ring);
    Contour loop = Contour::circle(Cplx(Real(1)), Real("0.2"));
    BranchTriple after = continue_triple(cp, ring, loop);
    CHECK(hpsurf::abs(after.h[0] - ring.h[2]) < tol_digits(25));
    CHECK(hpsurf::abs(after.h[2] - ring.h[0]) < tol_digits(25));
    CHECK(hpsurf::abs(after.h[1] - ring.h[1]) < tol_digits(25));
    // a loop around no branch point is the identity
    BranchTriple at23 = continue_triple(cp, start, Contour::segment(start.z, Cplx(Real("2.3"))));
    Contour loop2 = Contour::circle(Cplx(Real(2)), Real("0.3"));
    BranchTriple id = continue_triple(cp, at23, loop2);
    for (int k = 0; k < 3; ++k) CHECK(hpsurf::abs(id.h[k] - at23.h[k]) < tol_digits(25));
}

TEST_CASE("transport integral: sum of labeled integrals is zero on closed loops") {
    // sum_k h_k = 0 identically, so the summed transport integral vanishes
    CurveParams cp = case3();
    BranchTriple start = base_triple(cp);
    Contour loop = Contour::circle(Cplx(start.z.re), Real(1) / 2);
    // re-anchor on the circle first
    BranchTriple on_circle = continue_triple(cp, start, Contour::segment(start.z, Cplx(start.z.re + Real(1) / 2)));
    TransportResult tr = transport(cp, on_circle, loop, tol_digits(40));
    Cplx total = tr.integrals[0] + tr.integrals[1] + tr.integrals[2];
    CHECK(hpsurf::abs(total) < tol_digits(35));
}

TEST_CASE("transport around the far circle recovers residues of h") {
    // On a circle enclosing every branch point, h0 = 2/z + ..., so
    // oint h0 dz = 2 * 2 pi i; h_{1,2} give -2 pi i each.
    CurveParams cp = case2();
    Real R = 4;
    BranchTriple start = base_triple(cp);
    BranchTriple on_circle = continue_triple(cp, start, Contour::segment(start.z, Cplx(R)));
    TransportResult tr = transport(cp, on_circle, Contour::circle(Cplx(), R), tol_digits(40));
    Cplx two_pi_i(Real(0), 2 * pi_value());
    CHECK(hpsurf::abs(tr.integrals[0] - Cplx(Real(2)) * two_pi_i) < tol_digits(30));
    CHECK(hpsurf::abs(tr.integrals[1] + two_pi_i) < tol_digits(30));
    CHECK(hpsurf::abs(tr.integrals[2] + two_pi_i) < tol_digits(30));
}
