#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tve {

/// Ascending eigenvalues with B-orthonormal eigenvectors in the columns.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Problems up to this size go to the dense path.
inline constexpr Eigen::Index kDenseEigenLimit = 2000;

/// Smallest `count` eigenpairs of A x = λ B x with A symmetric and B SPD.
/// Throws SolverFailure if any pair misses the residual gate
///   ‖Ax − λBx‖ <= tol·(‖A‖₁ + |λ|‖B‖₁)·‖x‖.
EigenPairs smallest_eigenpairs(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::Index count,
                               double tol = 1e-10);

/// Sparse front end: dense below kDenseEigenLimit, shift-invert block
/// subspace iteration with Rayleigh–Ritz above it.
EigenPairs smallest_eigenpairs(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B,
                               Eigen::Index count, double tol = 1e-10);

/// Subspace iteration regardless of size (exposed for testing).
EigenPairs smallest_eigenpairs_iterative(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B,
                                         Eigen::Index count, double tol = 1e-10);

/// Flip each column so its first entry with |x_i| > 1e-8·max|x| is positive.
void apply_sign_convention(Eigen::MatrixXd& vectors);

}  // namespace tve
