// The harmonic height landscape of the surface.
//
// N(z^(k)) = Re \int h_k dz is a single-valued harmonic function on the
// surface once the parameter p is chosen correctly; its three sheet
// restrictions N_0, N_1, N_2 sum to zero and are continuous on the plane.
// They order the moduli |Phi^(k)| = exp N_k, which drive all asymptotic
// rates.  This module evaluates the N_k, classifies points by the sorted
// order of the three values, traces the level curves where two of them
// coincide, and locates the real triple point x_a (disjoint-interval
// configuration) where all three heights meet.
#pragma once

#include "hpsurf/curve.hpp"
#include "hpsurf/periods.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace hpsurf {

struct Landscape {
    CurveParams cp;
    BranchPoints bp;
    Real x0;           // real base point, right of every branch point
    BranchTriple base; // labeled fiber at x0
    std::array<Real, 3> C{}; // additive constants: N_k(x0)
    Real tol;          // absolute tolerance for path integrals
};

// Builds the landscape: fixes the three additive constants by continuity of
// N across the branch points gluing sheet 0 to sheets 1 and 2, then shifts
// so that N_0 + N_1 + N_2 = 0.
Landscape make_landscape(const CurveParams& cp, const Real& tol);

// The three sheet values (N_0, N_1, N_2) at z.  Points on a cut get the
// limit from the approach side used internally (upper half plane for real
// cuts, right half plane for the imaginary one); the N_k are continuous, so
// the side does not matter.  Branch points are allowed.
std::array<Real, 3> n_values(const Landscape& ls, const Cplx& z);

// Sorted-order label: order[0] is the sheet with the largest N, order[2]
// the smallest.  gamma is set when the top two values are within `band`.
struct RegionLabel {
    std::array<int, 3> order{};
    bool gamma = false;
};
RegionLabel classify(const Landscape& ls, const Cplx& z, const Real& band);
std::string label_name(const RegionLabel& lab); // "Omega_201" or "Gamma"

// The real point x_a in (0, a) where all three sheet values coincide
// (disjoint-interval configuration only).  Bracketed root of N_0 - N_2 on
// the soft interval; throws NoBracket if the sign change is absent.
Real find_xa(const Landscape& ls);

// Polyline along a level curve N_i = N_j.
struct LevelCurve {
    int i = 0, j = 0;
    Cplx seed;
    std::vector<Cplx> points;
};

struct TraceOptions {
    Real step = Real(1) / 64;    // arc-length step
    long max_steps = 4000;
    Cplx window_lo = Cplx(Real(-4), Real(-4));
    Cplx window_hi = Cplx(Real(4), Real(4));
    std::vector<Cplx> stop_points; // terminate when within one step
};

// Predictor-corrector tracing of N_i = N_j starting at a branch point seed
// in the given direction; stops at a branch point, a stop point, the window
// boundary, or after max_steps.
LevelCurve trace_gamma(const Landscape& ls, int i, int j, const Cplx& seed,
                       const Cplx& direction, const TraceOptions& opt = {});

// Pixel classification of a rectangular window.
struct RegionMap {
    Cplx lo, hi;
    int nx = 0, ny = 0;
    std::vector<RegionLabel> labels; // row-major, labels[j * nx + i]
    const RegionLabel& at(int i, int j) const { return labels[size_t(j) * nx + i]; }
    Cplx pixel_center(int i, int j) const;
};
RegionMap region_map(const Landscape& ls, const Cplx& lo, const Cplx& hi,
                     int nx, int ny, const Real& band);

// Connected components (4-neighbor) per label name, gamma pixels excluded.
std::map<std::string, int> component_counts(const RegionMap& map);

// |Phi^(k)(z)| = exp N_k(z).
Real phi_modulus(const Landscape& ls, const Cplx& z, int sheet);

// Cut-free route from the base point x0 to z (limit from above on the cuts);
// the same routing that fixes the sheet labels of n_values and classify.
Contour base_route(const CurveParams& cp, const BranchPoints& bp, const Real& x0, const Cplx& z);

}  // namespace hpsurf
