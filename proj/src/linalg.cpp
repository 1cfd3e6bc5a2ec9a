#include "jumpresp/linalg.hpp"

#include <complex>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "jumpresp/errors.hpp"

namespace jumpresp {

double min_real_eigenvalue(const Matrix& A) {
  Eigen::EigenSolver<Matrix> eig(A, false);
  if (eig.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return eig.eigenvalues().real().minCoeff();
}

Matrix solve_lyapunov(const Matrix& L, const Matrix& Q) {
  const Eigen::Index K = L.rows();
  if (L.cols() != K || Q.rows() != K || Q.cols() != K) throw ValidationError("Lyapunov: L and Q must be K x K");
  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;

  Eigen::ComplexSchur<Matrix> schur(L);
  if (schur.info() != Eigen::Success) throw NumericalError("Lyapunov: Schur decomposition failed");
  const CMatrix& T = schur.matrixT();
  const CMatrix& U = schur.matrixU();
  for (Eigen::Index i = 0; i < K; ++i) {
    if (!(T(i, i).real() > 0.0)) throw NumericalError("Lyapunov: L is not stable (eigenvalue with real part <= 0)");
  }

  const CMatrix Qt = U.adjoint() * Q.cast<Complex>() * U;
  CMatrix Y = CMatrix::Zero(K, K);
  for (Eigen::Index j = K - 1; j >= 0; --j) {
    for (Eigen::Index i = K - 1; i >= 0; --i) {
      Complex acc = Qt(i, j);
      for (Eigen::Index k = i + 1; k < K; ++k) acc -= T(i, k) * Y(k, j);
      for (Eigen::Index k = j + 1; k < K; ++k) acc -= Y(i, k) * std::conj(T(j, k));
      Y(i, j) = acc / (T(i, i) + std::conj(T(j, j)));
    }
  }
  Matrix C = (U * Y * U.adjoint()).real();
  return 0.5 * (C + C.transpose());
}

Matrix matrix_exponential(const Matrix& A, double t) {
  if (A.rows() != A.cols()) throw ValidationError("matrix exponential needs a square matrix");
  if (t == 0.0) return Matrix::Identity(A.rows(), A.cols());
  const Matrix At = A * t;
  return At.exp();
}

Matrix psd_factor(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace jumpresp
