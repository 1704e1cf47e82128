#include "hpsurf/linalg.hpp"

#include <stdexcept>

namespace hpsurf {

CVec lin_solve(CMat A, CVec b) {
    size_t n = A.size();
    if (n == 0 || A[0].size() != n || b.size() != n)
        throw std::invalid_argument("lin_solve: shape mismatch");
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        Real best = abs(A[col][col]);
        for (size_t r = col + 1; r < n; ++r)
            if (abs(A[r][col]) > best) { best = abs(A[r][col]); piv = r; }
        if (best == 0) throw std::runtime_error("lin_solve: singular matrix");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = col + 1; r < n; ++r) {
            Cplx m = A[r][col] / A[col][col];
            for (size_t c = col; c < n; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    CVec x(n);
    for (size_t r = n; r-- > 0;) {
        Cplx s = b[r];
        for (size_t c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

std::vector<CVec> nullspace(CMat A, const Real& tol) {
    if (A.empty()) return {};
    size_t m = A.size(), n = A[0].size();
    std::vector<long> pivot_of_col(n, -1);
    size_t row = 0;
    for (size_t col = 0; col < n && row < m; ++col) {
        size_t piv = row;
        Real best = abs(A[row][col]);
        for (size_t r = row + 1; r < m; ++r)
            if (abs(A[r][col]) > best) { best = abs(A[r][col]); piv = r; }
        if (best <= tol) continue;
        std::swap(A[piv], A[row]);
        Cplx inv = Cplx(Real(1)) / A[row][col];
        for (size_t c = 0; c < n; ++c) A[row][c] *= inv;
        for (size_t r = 0; r < m; ++r) {
            if (r == row) continue;
            Cplx f = A[r][col];
            if (abs(f) == 0) continue;
            for (size_t c = 0; c < n; ++c) A[r][c] -= f * A[row][c];
        }
        pivot_of_col[col] = static_cast<long>(row);
        ++row;
    }
    std::vector<CVec> basis;
    for (size_t free_col = 0; free_col < n; ++free_col) {
        if (pivot_of_col[free_col] >= 0) continue;
        CVec v(n);
        v[free_col] = Cplx(Real(1));
        for (size_t col = 0; col < n; ++col)
            if (pivot_of_col[col] >= 0)
                v[col] = -A[static_cast<size_t>(pivot_of_col[col])][free_col];
        basis.push_back(v);
    }
    return basis;
}

CMat mat_inverse(const CMat& A) {
    size_t n = A.size();
    CMat inv(n, CVec(n));
    for (size_t k = 0; k < n; ++k) {
        CVec e(n);
        e[k] = Cplx(Real(1));
        CVec col = lin_solve(A, e);
        for (size_t r = 0; r < n; ++r) inv[r][k] = col[r];
    }
    return inv;
}

CVec mat_vec(const CMat& A, const CVec& x) {
    CVec y(A.size());
    for (size_t r = 0; r < A.size(); ++r) {
        Cplx s;
        for (size_t c = 0; c < x.size(); ++c) s += A[r][c] * x[c];
        y[r] = s;
    }
    return y;
}

}  // namespace hpsurf
