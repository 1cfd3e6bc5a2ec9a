#pragma once

#include <cmath>
#include <random>

#include "jumpresp/core_model.hpp"

namespace jumpresp::testing {

inline double normal_pdf(double x, double mean = 0.0, double var = 1.0) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * M_PI * var);
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline Vector random_vector(Rng& rng, Eigen::Index n) { return standard_normal(rng, n); }

// Well-conditioned SPD matrix A A^T / K + shift I.
inline Matrix random_spd(Rng& rng, Eigen::Index K, double shift = 0.5) {
  const Matrix A = random_matrix(rng, K, K);
  return A * A.transpose() / static_cast<double>(K) + shift * Matrix::Identity(K, K);
}

// Stable (positive-real-part spectrum) drift matrix: SPD plus a skew part.
inline Matrix random_stable(Rng& rng, Eigen::Index K) {
  const Matrix S = random_matrix(rng, K, K);
  return random_spd(rng, K) + 0.5 * (S - S.transpose());
}

}  // namespace jumpresp::testing
