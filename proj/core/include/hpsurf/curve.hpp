// The cubic algebraic function and its three-sheeted Riemann surface.
//
// The defining equation is
//     A(z) h^3 - 3 B2(z) h - 2 B1(z) = 0,
//     A = (z^2-1)(z^2-a^2),  B2 = z^2 - p^2,  B1 = z,
// with parameters 0 < a < 1 and p.  Substituting H = A h makes the cubic
// monic, H^3 - 3 A B2 H - 2 A^2 B1 = 0, which keeps every finite point of
// the surface at finite H; we solve in H and divide back.
//
// The three solution branches are labeled by analytic continuation from a
// real base point to the right of every branch point, where they are real
// and ordered  h0 > h1 > h2  (h0 ~ 2/z, h_{1,2} ~ -1/z at infinity).
#pragma once

#include "hpsurf/numerics.hpp"
#include "hpsurf/quadrature.hpp"
#include "hpsurf/series.hpp"

#include <array>
#include <functional>
#include <vector>

namespace hpsurf {

enum class CaseId { I = 1, II = 2, III = 3 };

struct CurveParams {
    Real a;   // interior hard branch points at +-a (0 < a < 1)
    Real p;   // zero of B2; fixed by the geometry in cases II and III
    CaseId case_id = CaseId::II;

    Cplx A(const Cplx& z) const { return (z * z - Cplx(Real(1))) * (z * z - Cplx(a * a)); }
    Cplx B2(const Cplx& z) const { return z * z - Cplx(p * p); }
    Cplx B1(const Cplx& z) const { return z; }
    // d/dh of the defining cubic: 3 (A h^2 - B2)
    Cplx Fh(const Cplx& z, const Cplx& h) const { return Cplx(Real(3)) * (A(z) * h * h - B2(z)); }
};

// classify by a; for Case III (and II) p is determined: p^2 = (1+a^2)/3.
CaseId classify_case(const Real& a);
CurveParams make_params(const Real& a);                 // cases II/III (p forced)
CurveParams make_params(const Real& a, const Real& p);  // explicit p (Case I)

// Unordered fiber: the three roots of the cubic at z (any order).
std::array<Cplx, 3> solve_branches(const CurveParams& cp, const Cplx& z);

// Labeled fiber.  values[k] is the branch on sheet k.
struct BranchTriple {
    Cplx z;
    std::array<Cplx, 3> h;
};

// Labeled triple at the real base point x0 (to the right of all branch
// points): roots are real there and sorted descending, h0 > h1 > h2.
BranchTriple label_at_base(const CurveParams& cp, const Real& x0);
Real default_base_point(const CurveParams& cp);
BranchTriple base_triple(const CurveParams& cp);

// Discriminant D(z) = 108 A (B2^3 - A B1^2); vanishes exactly at the branch
// points of the surface.
Cplx discriminant(const CurveParams& cp, const Cplx& z);

struct BranchPoints {
    std::vector<Cplx> points;  // all finite branch points
    Real b = 0;                // real pair +-b (cases I and III; b = p = a in II)
    Real c = 0;                // imaginary pair +-ic (Case I only, else 0)
};
BranchPoints branch_points(const CurveParams& cp);

// Expansion data at the three points over infinity:
//   h0 = 2/z + O(1/z^3);  h_i = -1/z + alpha_i/z^2 + beta_i/z^3 + ...
// Case I: alpha_{1,2} = +-sqrt((1+a^2)/3 - p^2) (nonzero);
// cases II/III: alpha = 0 and beta_{1,2} are the roots of
//   3 b^2 + 2(1+a^2) b + a^2 = 0,
// ordered so that sheet 1 has the larger coefficient (matching the real
// ordering h1 > h2 at the base point).
struct InfinityCoeffs {
    std::array<Cplx, 3> alpha;  // 1/z^2 coefficients per sheet (index = sheet)
    std::array<Cplx, 3> beta;   // 1/z^3 coefficients per sheet
};
InfinityCoeffs infinity_coeffs(const CurveParams& cp);

// Taylor series in tau = 1/z of h_k(tau)/..., labeled by sheet:
// h_k(z) = sum_m c[k][m] tau^m (valuation 1).  nterms = series length.
std::array<Series, 3> infinity_series(const CurveParams& cp, size_t nterms);

// --- analytic continuation ------------------------------------------------

struct TransportResult {
    BranchTriple end;
    std::array<Cplx, 3> integrals;  // int h_k dz along the path, per label
    long steps = 0;
};

// Continue the labeled triple along the contour, accumulating int h_k dz for
// each label.  Steps adapt to the monodromy margin (roots must move by less
// than a fraction of their minimal separation per step) and to a quadrature
// error estimate with absolute tolerance `tol`.
TransportResult transport(const CurveParams& cp, const BranchTriple& start,
                          const Contour& path, const Real& tol);

// Continuation only (no integrals): cheaper stepping.
BranchTriple continue_triple(const CurveParams& cp, const BranchTriple& start,
                             const Contour& path);

// Same stepping as transport, but integrates an arbitrary fiber function
// f(z, h_k) dz per label instead of h_k dz.
TransportResult transport_fiber(const CurveParams& cp, const BranchTriple& start,
                                const Contour& path,
                                const std::function<Cplx(const Cplx&, const Cplx&)>& f,
                                const Real& tol);

// Match an unordered fiber against a nearby labeled triple; returns the
// labeled triple at fiber's z. Throws if the assignment is ambiguous.
BranchTriple match_fiber(const BranchTriple& prev, const Cplx& z, const std::array<Cplx, 3>& roots);

}  // namespace hpsurf
