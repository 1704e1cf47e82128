// Holomorphic differentials, the Riemann matrix, the Abel map, Riemann theta,
// Riemann constants, and divisor solutions of the Jacobi inversion problem.
//
// Differentials are represented by numerators in the span of
// {1, z, h, z h, z^2} over F_h(z, h) = 3 (A h^2 - B2); the holomorphic
// subspace (dimension g) is the nullspace of the pole-part conditions at the
// three points over infinity, computed from the labeled Taylor expansions of
// the branches in tau = 1/z.  Periods and Abel-map values are germ-tracked
// leg/contour integrals of these integrands.
#pragma once

#include "hpsurf/landscape.hpp"
#include "hpsurf/periods.hpp"
#include "hpsurf/series.hpp"

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpsurf {

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SymmetryViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonUnique : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NearInfinity0 : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySelection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complex g-vector (g <= 2 throughout).
using Vec = std::vector<Cplx>;
// Dense complex matrix, row major.
using Mat = std::vector<std::vector<Cplx>>;

// One differential: numerator = sum coeff[j] * {1, z, h, z h, z^2}[j],
// divided by F_h(z, h).
struct HolDiff {
    std::array<Cplx, 5> coeff{};
};
Cplx hol_integrand(const CurveParams& cp, const HolDiff& w, const Cplx& z, const Cplx& h);

struct HolDiffBasis {
    int g = 1;
    std::vector<HolDiff> forms;  // alpha-normalized: o-int_{alpha_k} dOmega_j = delta_jk
    // Taylor series in tau = 1/z of each integrand per sheet (valuation >= 2;
    // index [form][sheet]).  Used for residue checks and the tails of the
    // Abel map at the points over infinity.
    std::vector<std::array<Series, 3>> at_infinity;
};

// Construct the holomorphic basis from the candidate pool, selecting the
// g-dimensional subspace with vanishing pole parts at the three points over
// infinity and an invertible alpha-period matrix, then normalizing.
HolDiffBasis hol_diff_basis(const CurveParams& cp, const CycleSet& cycles, const Real& tol);

struct RiemannMatrix {
    int g = 1;
    Mat B;                 // [o-int_{beta_j} dOmega_i]_{ij}
    Real symmetry_defect;  // max |B_ij - B_ji|
    Real im_min_eig;       // smallest eigenvalue of Im B (must be > 0)
};
RiemannMatrix riemann_matrix(const CurveParams& cp, const HolDiffBasis& basis,
                             const CycleSet& cycles, const Real& tol);

// A point of the surface: base-frame germ label over z (limit from above on
// the cuts), or a point over infinity when at_infinity is set.
struct SurfacePoint {
    Cplx z;
    int sheet = 0;
    bool at_infinity = false;
    static SurfacePoint infinity(int sheet) {
        SurfacePoint p;
        p.at_infinity = true;
        p.sheet = sheet;
        return p;
    }
};
// Distance |z1 - z2| + |h(p1) - h(p2)| used for divisor comparison; points
// over infinity compare at tau = 1/z with h replaced by its limit.
Real surface_distance(const CurveParams& cp, const SurfacePoint& p, const SurfacePoint& q);

struct AbelAtlas {
    CurveParams cp;
    BranchPoints bp;
    CycleSet cycles;
    HolDiffBasis basis;
    RiemannMatrix rm;
    Real tol;
    Real x0;                          // labeling base point
    std::array<Vec, 3> omega_x0;      // Omega at (x0, sheet k), from e1 over z=1
    std::array<Vec, 3> omega_inf;     // Omega(inf^(k))
    std::array<Vec, 3> v;             // v_k = Omega(inf^(k)) - Omega(inf^(0))
    Vec K;                            // Riemann constants
    Real x_far;                       // series takeover radius for the infinity tails
    // lazily built Abel-map grid shared by solve_jip calls (type-erased to
    // keep the cache layout private to the implementation)
    mutable std::shared_ptr<void> grid_cache;
};

AbelAtlas make_atlas(const CurveParams& cp, const Real& tol);

// Abel map Omega(p) = int_{e1}^{p} dOmega, where e1 is the branch point over
// z = 1; single determination fixed by cut-free routing from the base point
// (limit from above on the cuts).  Branch points are handled as limits.
Vec abel_map(const AbelAtlas& atlas, const SurfacePoint& p);

// v reduced to x + B y with x, y in [0,1)^g: v = value + jint + B * mint.
struct LatticeReduced {
    Vec value;
    std::vector<long> jint, mint;
};
LatticeReduced lattice_reduce(const RiemannMatrix& rm, const Vec& v);
// Max norm of the lattice-reduced difference, minimized over nearby lattice
// translates (congruence defect of u = w mod Z^g + B Z^g).
Real lattice_defect(const RiemannMatrix& rm, const Vec& u, const Vec& w);

// Riemann theta function; the lattice sum is truncated so the dropped tail
// is below abs_tol (radius from the Gaussian decay of the summand).
Cplx theta(const Vec& u, const RiemannMatrix& rm, const Real& abs_tol);

// Riemann constants: (B-1)/2 for g = 1; for g = 2 the diagonal closed form
// with the alpha-cycle boundary integral of Omega_k against dOmega_{3-k}.
Vec riemann_constants(const AbelAtlas& atlas);

// One located zero of z -> theta(Omega(z) - T).
struct ThetaZero {
    bool at_infinity = false;
    int sheet = -1;  // filled for zeros at infinity
    Cplx z, h;       // filled for finite zeros
    Vec omega;
};

// All zeros of z -> theta(Omega(z) - T) on the surface (at most g finite ones
// plus any of the three points over infinity).
std::vector<ThetaZero> theta_divisor(const AbelAtlas& atlas, const Vec& T);

struct DivisorSolution {
    int n = 0, k = 0;
    std::vector<SurfacePoint> points;  // g points, possibly coincident
    bool unique = true;
    bool admissible = true;
    Real residual;  // lattice-reduced defect of the inversion congruence
};

// Solve the Jacobi inversion problem for index n and sheet k:
//   Omega(D) = Omega(g inf^(2)) + v_k + c_rho + n (omega + B tau)  mod lattice,
// via theta zeros on a sheet-cell grid with Newton polishing.
// Throws NonUnique when the theta numerator vanishes identically (g = 2
// special divisors) and NearInfinity0 when the divisor meets a neighborhood
// of inf^(0).
DivisorSolution solve_jip(const AbelAtlas& atlas, int n, int k, const Vec& c_rho,
                          const std::vector<Real>& omega, const std::vector<Real>& tau);

// Indices in [n_lo, n_hi] whose divisors exist, are unique, and stay eps0
// away from inf^(0) (and from the special locus when g = 2), with
// eps0 = 1e-3 of the surface diameter proxy.
std::vector<int> select_admissible(const AbelAtlas& atlas, int n_lo, int n_hi, int k,
                                   const Vec& c_rho, const std::vector<Real>& omega,
                                   const std::vector<Real>& tau);

}  // namespace hpsurf
