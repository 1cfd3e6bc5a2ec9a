#pragma once

#include <vector>

namespace jumpresp {

// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix with
// off-diagonal sqrt(k / 2); weights are sqrt(pi) times the squared first
// eigenvector components.
GaussHermiteRule gauss_hermite(int n);

}  // namespace jumpresp
