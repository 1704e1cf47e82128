// Small dense complex linear algebra (systems here are at most ~30 x 30).
#pragma once

#include "hpsurf/numerics.hpp"

#include <vector>

namespace hpsurf {

using CVec = std::vector<Cplx>;
using CMat = std::vector<std::vector<Cplx>>;

// Solve A x = b by Gaussian elimination with partial pivoting.
CVec lin_solve(CMat A, CVec b);

// Basis of the (numerical) nullspace of A (m x n), entries with singular
// pivots below `tol` treated as zero.  Returned vectors have length n.
std::vector<CVec> nullspace(CMat A, const Real& tol);

CMat mat_inverse(const CMat& A);
CVec mat_vec(const CMat& A, const CVec& x);

}  // namespace hpsurf
