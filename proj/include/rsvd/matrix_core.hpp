#pragma once

#include <vector>

#include "rsvd/dense_matrix.hpp"

namespace rsvd {

struct SymEigResult {
    DenseMatrix vectors;         // orthogonal, one eigenvector per column
    std::vector<double> values;  // ascending
};

struct EigSvdResult {
    DenseMatrix u;              // n x b, orthonormal columns
    std::vector<double> sigma;  // ascending, non-negative
    DenseMatrix v;              // b x b, orthogonal
};

inline constexpr double kPivotTol = 1e-12;  // relative Cholesky pivot floor
inline constexpr double kEigTol = 1e-12;    // relative Gram eigenvalue floor

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a' * b and a * b'.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

// Cyclic Jacobi with off-diagonal threshold 1e-14 * frobenius norm and a cap
// of 30 sweeps. Accumulated rotations keep the eigenvector matrix orthogonal
// regardless of conditioning. Eigenvalues come out ascending.
SymEigResult sym_eig(const DenseMatrix& m);

// Lower Cholesky factor; a pivot at or below pivot_tol times the largest
// diagonal entry signals RankDeficient. diag_ref overrides the reference
// diagonal, letting a bordered sub-factorization apply the scale of the full
// matrix it extends.
DenseMatrix chol_factor(const DenseMatrix& z, double pivot_tol = kPivotTol,
                        double diag_ref = 0.0);
DenseMatrix chol_solve(const DenseMatrix& z, const DenseMatrix& rhs);
// Solve with a precomputed factor: L L' x = rhs.
DenseMatrix chol_solve_factored(const DenseMatrix& l, const DenseMatrix& rhs);
// In-place triangular solves against a lower factor.
void trsm_lower(const DenseMatrix& l, DenseMatrix& x);         // L x = rhs
void trsm_lower_trans(const DenseMatrix& l, DenseMatrix& x);   // L' x = rhs
// x <- x * L'^{-1} (right-side solve used by the bordered residual update).
void trsm_right_lower_trans(const DenseMatrix& l, DenseMatrix& x);

// Economic SVD of a tall matrix from the eigendecomposition of w'w. The Gram
// route costs one n*b^2 product plus a b x b eigensolve; it loses half the
// digits when w is ill conditioned, which callers accept because the
// factorization driver regenerates degenerate blocks. Smallest Gram
// eigenvalue at or below eig_tol times the largest signals RankDeficient;
// eig_tol = 0 disables the relative check (power iterates are legitimately
// ill conditioned and rely on the sigma floor instead).
EigSvdResult eig_svd(const DenseMatrix& w, double eig_tol = kEigTol);

double frob_norm_sq(const DenseMatrix& m);
// tr(t * z^{-1}) via Cholesky solve, the residual bookkeeping primitive.
double trace_of_product_solve(const DenseMatrix& t, const DenseMatrix& z);

}  // namespace rsvd
