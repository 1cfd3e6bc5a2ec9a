#include "jumpresp/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "jumpresp/errors.hpp"
#include "jumpresp/types.hpp"

namespace jumpresp {

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw ValidationError("Gauss-Hermite rule needs at least one node");
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * k);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigenproblem failed");
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()[i];
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = sqrt_pi * v0 * v0;
  }
  // Symmetrize against eigensolver rounding.
  for (int i = 0; i < n / 2; ++i) {
    auto& a = rule.nodes[static_cast<std::size_t>(i)];
    auto& b = rule.nodes[static_cast<std::size_t>(n - 1 - i)];
    const double x = 0.5 * (b - a);
    a = -x;
    b = x;
    auto& wa = rule.weights[static_cast<std::size_t>(i)];
    auto& wb = rule.weights[static_cast<std::size_t>(n - 1 - i)];
    const double w = 0.5 * (wa + wb);
    wa = w;
    wb = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace jumpresp
