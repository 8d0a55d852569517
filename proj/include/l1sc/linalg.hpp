#pragma once

#include <Eigen/Dense>

namespace l1sc {

using Index = Eigen::Index;

/// Eigenpairs sorted by descending eigenvalue; column j of `vectors` pairs
/// with `values[j]`.
struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Lower-triangular L with L L^T = b. Throws NotPositiveDefinite when a pivot
/// is not safely positive.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& b);

/// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal
/// Frobenius norm is <= tol * ||a||_F. Eigenvectors are orthonormal.
EigenResult jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-12);

/// Generalized symmetric-definite problem a w = lambda b w. Reduced to
/// L^-1 a L^-T y = lambda y with b = L L^T, solved by jacobi_eigen, and mapped
/// back by w = L^-T y, so the returned vectors are b-orthonormal.
EigenResult sym_geig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// residual norm drops below `tol` relative to their input norm make it throw
/// DimensionExhausted.
Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& m, double tol = 1e-10);

}  // namespace l1sc
