#include "hpsurf/landscape.hpp"

#include <doctest.h>

using namespace hpsurf;

namespace {
Real tol20() { return Real("1e-20"); }
}  // namespace

TEST_CASE("touching configuration: heights, branch-point continuity, far field") {
    CurveParams cp = make_params(Real(9) / 10);
    Landscape ls = make_landscape(cp, tol20());

    // zero sum at a generic point
    std::array<Real, 3> N = n_values(ls, Cplx(Real(3) / 10, Real(1) / 2));
    CHECK(abs(N[0] + N[1] + N[2]) < Real("1e-25"));

    // b is the soft edge of the 0-1 cut here, so those two heights meet
    std::array<Real, 3> Nb = n_values(ls, Cplx(ls.bp.b));
    CHECK(abs(Nb[0] - Nb[1]) < Real("1e-18"));
    CHECK(Nb[0] > Nb[2]);
    CHECK(abs(Nb[0] - Real("0.22200146703918717003")) < Real("1e-15"));

    // 1 is a hard point exchanging sheets 0 and 2
    std::array<Real, 3> N1 = n_values(ls, Cplx(Real(1)));
    CHECK(abs(N1[0] - N1[2]) < Real("1e-18"));
    CHECK(abs(N1[0] - Real("0.0245008694883")) < Real("1e-11"));

    // far field: N_0 ~ 2 log|z|, N_1, N_2 ~ -log|z|
    Cplx big(Real(1000), Real(1));
    std::array<Real, 3> Nf = n_values(ls, big);
    Real lg = log(abs(big));
    CHECK(abs(Nf[0] - 2 * lg) < 3);
    CHECK(abs(Nf[1] + lg) < 3);
    CHECK(abs(Nf[2] + lg) < 3);
    RegionLabel far = classify(ls, big, Real("1e-8"));
    CHECK(far.order[0] == 0);
    CHECK(!far.gamma);
}

TEST_CASE("touching configuration: orderings, symmetry, moduli") {
    CurveParams cp = make_params(Real(9) / 10);
    Landscape ls = make_landscape(cp, tol20());

    // on the right hard interval the glued pair ties and sheet 1 leads
    std::array<Real, 3> Nh = n_values(ls, Cplx((ls.cp.a + 1) / 2));
    CHECK(abs(Nh[0] - Nh[2]) < Real("1e-18"));
    CHECK(Nh[1] > Nh[0]);

    // in the gap (b, a) sheet 1 still leads: the bounded 102 lobe
    RegionLabel gap = classify(ls, Cplx((ls.bp.b + ls.cp.a) / 2), Real("1e-8"));
    CHECK(label_name(gap) == "Omega_102");

    // right of every branch point the base ordering holds
    std::array<Real, 3> Nr = n_values(ls, Cplx(Real(3)));
    CHECK(Nr[0] > Nr[1]);
    CHECK(Nr[1] > Nr[2]);

    // even symmetry of every sheet and unit product of the moduli
    Cplx zt(Real(4) / 10, Real(7) / 10);
    Real prod(1);
    for (int k = 0; k < 3; ++k) {
        Real mp = phi_modulus(ls, zt, k), mm = phi_modulus(ls, -zt, k);
        CHECK(abs(mp - mm) < Real("1e-18"));
        prod *= mp;
    }
    CHECK(abs(prod - 1) < Real("1e-18"));
}

TEST_CASE("path independence of the height triple") {
    CurveParams cp = make_params(Real(9) / 10);
    Landscape ls = make_landscape(cp, tol20());
    Cplx z(Real(-3) / 2, Real(6) / 5);
    std::array<Real, 3> direct = n_values(ls, z);

    // a detour through the upper half plane, same homotopy class
    Contour ct;
    ct.add_line(Cplx(ls.x0), Cplx(Real(18) / 10, Real(5) / 2));
    ct.add_line(Cplx(Real(18) / 10, Real(5) / 2), Cplx(Real(-3) / 2, Real(5) / 2));
    ct.add_line(Cplx(Real(-3) / 2, Real(5) / 2), z);
    TransportResult tr = transport(ls.cp, ls.base, ct, ls.tol);
    for (int k = 0; k < 3; ++k) {
        Real alt = ls.C[k] + tr.integrals[k].re;
        CHECK(abs(alt - direct[k]) < Real("1e-18"));
    }
}

TEST_CASE("triple-point configuration: two labels split along Re z^2 = 1/2") {
    CurveParams cp = make_params(sqrt(Real(1) / 2));
    Landscape ls = make_landscape(cp, Real("1e-12"));

    // interior lobe point (Re z^2 > 1/2); on the hard interval itself the two
    // competing sheet values coincide, so probe just off the axis
    CHECK(label_name(classify(ls, Cplx(Real(9) / 10, Real(1) / 10), Real("1e-8"))) == "Omega_021");
    CHECK(label_name(classify(ls, Cplx(Real(0), Real(9) / 10), Real("1e-8"))) == "Omega_012");

    RegionMap rm = region_map(ls, Cplx(Real(-2), Real(-2)), Cplx(Real(2), Real(2)),
                              16, 16, Real("0.02"));
    std::map<std::string, int> cc = component_counts(rm);
    CHECK(cc.size() == 2);
    CHECK(cc["Omega_012"] == 1);
    CHECK(cc["Omega_021"] == 2);
}

TEST_CASE("disjoint configuration: region labels and the real triple point") {
    Real a(Real(1) / 2), p("0.562558084205668602880689804699681");
    CurveParams cp = make_params(a, p);
    Landscape ls = make_landscape(cp, tol20());

    // between the soft and hard intervals sheet 2 leads
    CHECK(label_name(classify(ls, Cplx((a + ls.bp.b) / 2), Real("1e-10"))) == "Omega_201");

    Real xa = find_xa(ls);
    CHECK(xa > 0);
    CHECK(xa < a);
    CHECK(abs(xa - Real("0.49602839675597951281655334702692633")) < Real("1e-25"));

    // all three heights meet there
    std::array<Real, 3> Nx = n_values(ls, Cplx(xa));
    CHECK(abs(Nx[0] - Nx[1]) < Real("1e-19"));
    CHECK(abs(Nx[0] - Nx[2]) < Real("1e-19"));

    // inside (0, x_a) the tied 0-1 pair leads
    std::array<Real, 3> Ni = n_values(ls, Cplx(xa / 2));
    CHECK(abs(Ni[0] - Ni[1]) < Real("1e-19"));
    CHECK(Ni[0] > Ni[2]);
}

TEST_CASE("level curves of the disjoint configuration meet at the triple point") {
    Real a(Real(1) / 2), p("0.562558084205668602880689804699681");
    CurveParams cp = make_params(a, p);
    Landscape ls = make_landscape(cp, Real("1e-12"));
    Real xa("0.49602839675597951281655334702692633");
    TraceOptions opt;
    opt.step = Real(1) / 64;
    opt.stop_points = {Cplx(xa), Cplx(-xa)};

    // from ic into the right half plane along the 1-2 level set
    LevelCurve down = trace_gamma(ls, 1, 2, Cplx(Real(0), ls.bp.c),
                                  Cplx(Real(1), Real(-1)), opt);
    CHECK(abs(down.points.back() - Cplx(xa)) < Real("1e-25"));

    // from b into the lower half plane along the 0-2 level set
    LevelCurve loop = trace_gamma(ls, 0, 2, Cplx(ls.bp.b),
                                  Cplx(Real(-1), Real(-1)), opt);
    CHECK(abs(loop.points.back() - Cplx(xa)) < Real("1e-25"));

    // from ic straight up the level set escapes along the imaginary axis
    LevelCurve up = trace_gamma(ls, 1, 2, Cplx(Real(0), ls.bp.c),
                                Cplx(Real(0), Real(1)), opt);
    CHECK(abs(up.points.back().re) < Real(1) / 100);
    CHECK(up.points.back().im > Real(3));
}

TEST_CASE("second disjoint configuration has its own triple point") {
    Real a(Real(3) / 10), p("0.392787555250672417838662570743109");
    CurveParams cp = make_params(a, p);
    Landscape ls = make_landscape(cp, tol20());
    Real xa = find_xa(ls);
    CHECK(abs(xa - Real("0.28631101315845149620322232090762527")) < Real("1e-25"));
}
