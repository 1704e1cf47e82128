#include <doctest.h>

#include <hpsurf/linalg.hpp>
#include <hpsurf/numerics.hpp>
#include <hpsurf/quadrature.hpp>
#include <hpsurf/roots.hpp>
#include <hpsurf/series.hpp>

using namespace hpsurf;
using boost::multiprecision::abs;

static Real tol_digits(int d) { return boost::multiprecision::pow(Real(10), -d); }

TEST_CASE("complex elementary functions") {
    Cplx z(Real(3), Real(4));
    CHECK(abs(hpsurf::abs(z) - 5) < tol_digits(70));
    Cplx s = hpsurf::sqrt(z);
    CHECK(hpsurf::abs(s * s - z) < tol_digits(70));
    // principal branch: sqrt(-1 - 0i eps) has Re >= 0
    Cplx m = hpsurf::sqrt(Cplx(Real(-4), Real(0)));
    CHECK(abs(m.re) < tol_digits(70));
    CHECK(abs(m.im - 2) < tol_digits(70));
    Cplx e = hpsurf::exp(Cplx(Real(0), pi_value()));
    CHECK(hpsurf::abs(e - Cplx(Real(-1))) < tol_digits(70));
    Cplx l = hpsurf::log(Cplx(Real(0), Real(1)));
    CHECK(abs(l.im - pi_value() / 2) < tol_digits(70));
    CHECK(hpsurf::abs(pow_int(z, 3) - z * z * z) < tol_digits(65));
}

TEST_CASE("deterministic 40-digit formatting") {
    Real x = Real(1) / 3;
    std::string s = format_real(x, 40);
    CHECK(s.substr(0, 10) == "0.33333333");
    CHECK(format_real(Real(0), 40) == "0");
    // round-half-even at the rendered digit
    CHECK(format_real(Real("0.125"), 2) == "0.12");
    CHECK(format_real(Real("0.375"), 2) == "0.38");
}

TEST_CASE("gauss-legendre quadrature: entire integrand") {
    // spec example: int_0^1 exp(z) dz = e - 1 to ~1e-70 at 256 bits
    Real tol = tol_digits(70);
    Cplx val = integrate([](const Cplx& z) { return hpsurf::exp(z); },
                         Contour::segment(Cplx(Real(0)), Cplx(Real(1))), tol);
    Real expect = boost::multiprecision::exp(Real(1)) - 1;
    CHECK(hpsurf::abs(val - Cplx(expect)) < tol_digits(68));
}

TEST_CASE("quadrature around a pole: residue theorem") {
    // spec example: (1/2 pi i) oint dz/z = 1 on the unit circle
    Real tol = tol_digits(60);
    Cplx val = integrate([](const Cplx& z) { return Cplx(Real(1)) / z; },
                         Contour::circle(Cplx(), Real(1)), tol);
    Cplx expected(Real(0), 2 * pi_value());
    CHECK(hpsurf::abs(val - expected) < tol_digits(58));
}

TEST_CASE("find_root keeps brackets and reaches tolerance") {
    // spec example: root of x^2 - 2 in [1, 2]
    Real r = find_root([](const Real& x) { return x * x - 2; }, Real(1), Real(2), tol_digits(70));
    CHECK(abs(r - boost::multiprecision::sqrt(Real(2))) < tol_digits(68));
    CHECK_THROWS(find_root([](const Real& x) { return x * x + 1; }, Real(0), Real(1), tol_digits(10)));
}

TEST_CASE("poly_roots on wilkinson-style and complex polynomials") {
    // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
    std::vector<Cplx> c = {Cplx(Real(-6)), Cplx(Real(11)), Cplx(Real(-6)), Cplx(Real(1))};
    auto roots = poly_roots(c, tol_digits(70));
    REQUIRE(roots.size() == 3);
    std::sort(roots.begin(), roots.end(), [](const Cplx& x, const Cplx& y) { return x.re < y.re; });
    for (int k = 0; k < 3; ++k) CHECK(hpsurf::abs(roots[k] - Cplx(Real(k + 1))) < tol_digits(60));

    // z^4 + 1: roots on the unit circle at odd multiples of pi/4
    std::vector<Cplx> q = {Cplx(Real(1)), Cplx(), Cplx(), Cplx(), Cplx(Real(1))};
    auto r4 = poly_roots(q, tol_digits(70));
    REQUIRE(r4.size() == 4);
    for (const auto& r : r4) CHECK(abs(hpsurf::abs(r) - 1) < tol_digits(60));
}

TEST_CASE("count_zeros via the argument principle") {
    // spec example: z^2 (simple double zero) inside [-1,1]^2 -> 2
    auto f = [](const Cplx& z) { return z * z; };
    CHECK(count_zeros(f, Cplx(Real(-1), Real(-1)), Cplx(Real(1), Real(1))) == 2);
    // no zeros of exp
    auto g = [](const Cplx& z) { return hpsurf::exp(z); };
    CHECK(count_zeros(g, Cplx(Real(-1), Real(-1)), Cplx(Real(1), Real(1))) == 0);
    // sin has zeros 0, +-pi: box [-4,4]x[-1,1] contains 3
    auto s = [](const Cplx& z) {
        Cplx iz = i_times(z);
        return (hpsurf::exp(iz) - hpsurf::exp(-iz)) / Cplx(Real(0), Real(2));
    };
    CHECK(count_zeros(s, Cplx(Real(-4), Real(-1)), Cplx(Real(4), Real(1))) == 3);
}

TEST_CASE("linear algebra: solve and nullspace") {
    CMat A = {{Cplx(Real(2)), Cplx(Real(1))}, {Cplx(Real(1)), Cplx(Real(3))}};
    CVec b = {Cplx(Real(5)), Cplx(Real(10))};
    CVec x = lin_solve(A, b);
    CHECK(hpsurf::abs(x[0] - Cplx(Real(1))) < tol_digits(70));
    CHECK(hpsurf::abs(x[1] - Cplx(Real(3))) < tol_digits(70));

    // rank-1 matrix has a 1-dim nullspace in 2 columns
    CMat B = {{Cplx(Real(1)), Cplx(Real(2))}, {Cplx(Real(2)), Cplx(Real(4))}};
    auto ns = nullspace(B, tol_digits(60));
    REQUIRE(ns.size() == 1);
    Cplx r = B[0][0] * ns[0][0] + B[0][1] * ns[0][1];
    CHECK(hpsurf::abs(r) < tol_digits(60));
}

TEST_CASE("series arithmetic and valuation-aware division") {
    size_t L = 12;
    Series t = Series::variable(L);
    Series one = Series::constant(Cplx(Real(1)), L);
    // (1 - t) * (1 + t + t^2 + ...) = 1
    Series geo(L);
    for (size_t m = 0; m < L; ++m) geo.c[m] = Cplx(Real(1));
    Series prod = (one - t) * geo;
    CHECK(hpsurf::abs(prod.c[0] - Cplx(Real(1))) < tol_digits(70));
    for (size_t m = 1; m + 1 < L; ++m) CHECK(hpsurf::abs(prod.c[m]) < tol_digits(70));
    // t^2 / t = t
    Series q = Series::divide(t * t, t, tol_digits(60));
    CHECK(hpsurf::abs(q.c[1] - Cplx(Real(1))) < tol_digits(70));
}
