// Scalar root finding, polynomial roots, and argument-principle zero counts.
#pragma once

#include "hpsurf/numerics.hpp"

#include <functional>
#include <vector>

namespace hpsurf {

using RFunc = std::function<Real(const Real&)>;

// Bracket-preserving root finder (Brent's method).  Requires f(a) f(b) <= 0;
// throws std::invalid_argument otherwise.
Real find_root(const RFunc& f, Real a, Real b, const Real& tol, int max_iter = 200);

// All complex roots of sum_k coeffs[k] z^k (ascending order, coeffs.back() != 0),
// by Aberth-Ehrlich iteration at working precision.
std::vector<Cplx> poly_roots(const std::vector<Cplx>& coeffs, const Real& tol, int max_iter = 500);

// Number of zeros (with multiplicity) of an analytic f inside the rectangle
// [lo.re, hi.re] x [lo.im, hi.im], by tracking the winding of arg f along the
// boundary with adaptive refinement.  f must be zero-free on the boundary.
using CF = std::function<Cplx(const Cplx&)>;
long count_zeros(const CF& f, const Cplx& lo, const Cplx& hi, int max_refine = 24);

// Polish a simple zero of f by the secant method in the complex plane.
Cplx polish_zero(const CF& f, Cplx z0, const Real& tol, int max_iter = 80);

}  // namespace hpsurf
