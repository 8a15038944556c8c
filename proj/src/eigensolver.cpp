#include "tve/eigensolver.hpp"

#include "tve/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <random>
#include <string>
#include <vector>

namespace tve {

namespace {

double norm1(const Eigen::MatrixXd& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

double norm1(const Eigen::SparseMatrix<double>& a) {
  double best = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

template <class MatA, class MatB>
void check_residuals(const MatA& A, const MatB& B, const EigenPairs& ep, double tol) {
  const double na = norm1(A), nb = norm1(B);
  for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
    const Eigen::VectorXd x = ep.vectors.col(i);
    const double lam = ep.values[i];
    const double r = (A * x - lam * (B * x)).norm();
    const double scale = (na + std::abs(lam) * nb) * x.norm();
    if (!(r <= tol * scale))
      throw SolverFailure("eigensolver: pair " + std::to_string(i) + " residual " + std::to_string(r / scale) +
                          " exceeds tolerance");
  }
}

// Largest eigenvalues first would be the natural output of subspace
// iteration; everything here is returned ascending.
EigenPairs dense_pairs(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::Index count) {
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw SolverFailure("eigensolver: B is not positive definite");
  const auto L = llt.matrixL();
  Eigen::MatrixXd C = L.solve(A);
  C = L.solve(Eigen::MatrixXd(C.transpose())).transpose().eval();
  C = 0.5 * (C + C.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw SolverFailure("eigensolver: dense symmetric solve failed");

  EigenPairs ep;
  ep.values = es.eigenvalues().head(count);
  ep.vectors = L.transpose().solve(es.eigenvectors().leftCols(count));
  return ep;
}

}  // namespace

void apply_sign_convention(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double cut = 1e-8 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > cut) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
}

EigenPairs smallest_eigenpairs(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::Index count, double tol) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw DimensionMismatch("eigensolver: A and B must be square and of equal size");
  if (count < 1 || count > A.rows()) throw PreconditionError("eigensolver: requested count out of range");
  EigenPairs ep = dense_pairs(A, B, count);
  apply_sign_convention(ep.vectors);
  check_residuals(A, B, ep, tol);
  return ep;
}

EigenPairs smallest_eigenpairs_iterative(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B,
                                         Eigen::Index count, double tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw DimensionMismatch("eigensolver: size mismatch");
  if (count < 1 || count > n) throw PreconditionError("eigensolver: requested count out of range");
  const Eigen::Index block = std::min(n, std::max<Eigen::Index>(2 * count, count + 8));

  // A may be singular (Neumann Laplacian): shift slightly below zero.
  const double shift = -1e-6 * A.diagonal().cwiseAbs().maxCoeff() / B.diagonal().cwiseAbs().maxCoeff();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A - shift * B);
  if (solver.info() != Eigen::Success) throw SolverFailure("eigensolver: factorization of shifted operator failed");

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = normal(rng);

  const double na = norm1(A), nb = norm1(B);
  EigenPairs ep;
  for (int it = 0; it < 1000; ++it) {
    const Eigen::MatrixXd Y = solver.solve(B * X);
    Eigen::MatrixXd ar = Y.transpose() * (A * Y);
    Eigen::MatrixXd br = Y.transpose() * (B * Y);
    ar = 0.5 * (ar + ar.transpose()).eval();
    br = 0.5 * (br + br.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(ar, br);
    if (rr.info() != Eigen::Success) throw SolverFailure("eigensolver: Rayleigh-Ritz step failed");
    X = Y * rr.eigenvectors();

    bool done = true;
    for (Eigen::Index i = 0; i < count && done; ++i) {
      const Eigen::VectorXd x = X.col(i);
      const double lam = rr.eigenvalues()[i];
      const double r = (A * x - lam * (B * x)).norm();
      done = r <= 0.1 * tol * (na + std::abs(lam) * nb) * x.norm();
    }
    if (done) {
      ep.values = rr.eigenvalues().head(count);
      ep.vectors = X.leftCols(count);
      apply_sign_convention(ep.vectors);
      check_residuals(A, B, ep, tol);
      return ep;
    }
  }
  throw SolverFailure("eigensolver: subspace iteration did not converge");
}

EigenPairs smallest_eigenpairs(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B,
                               Eigen::Index count, double tol) {
  if (A.rows() <= kDenseEigenLimit) return smallest_eigenpairs(Eigen::MatrixXd(A), Eigen::MatrixXd(B), count, tol);
  return smallest_eigenpairs_iterative(A, B, count, tol);
}

}  // namespace tve
