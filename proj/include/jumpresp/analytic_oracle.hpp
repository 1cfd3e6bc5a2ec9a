#pragma once

#include <vector>

#include "jumpresp/core_model.hpp"
#include "jumpresp/linalg.hpp"
#include "jumpresp/response_estimators.hpp"

namespace jumpresp {

// Centered OU process dx = -L x dt + G dW with its stationary covariance.
class OUParams {
 public:
  OUParams(Matrix L, Matrix G);

  Eigen::Index dim() const { return L_.rows(); }
  const Matrix& L() const { return L_; }
  const Matrix& G() const { return G_; }
  // Solution C of L C + C L^T = G G^T.
  const Matrix& cov() const { return cov_; }
  GaussianDensity stationary_density() const { return GaussianDensity(Vector::Zero(dim()), cov_); }

 private:
  Matrix L_;
  Matrix G_;
  Matrix cov_;
};

// exp(-tau L) h for a z-free affine jump; the H x part averages out under
// the centered stationary density.
ResponseCurve ou_mean_response_det(const OUParams& ou, const AffineJumpMap& map, const std::vector<double>& tgrid);

// exp(-tau L)(h + H* zbar)
ResponseCurve ou_mean_response_random(const OUParams& ou, const AffineJumpMap& map, const JumpLaw& law,
                                      const std::vector<double>& tgrid);

// Gaussian-product moments of a state weight under N(0, C):
// I0 = int g p0 dx, I1 = int x g p0 dx.
struct ShapeMoments {
  double mass;
  Vector first;
};
ShapeMoments ou_shape_moments(const OUParams& ou, const IntensityShape& gshape);

// exp(-tau L)[(h + H* zbar) I0 + H I1]; equals ou_mean_response_random for g = 1.
ResponseCurve ou_response_operator(const OUParams& ou, const AffineJumpMap& map, const JumpLaw& law,
                                   const IntensityShape& gshape, const std::vector<double>& tgrid);

struct PerturbedMean {
  ResponseCurve curve;
  // Set when L - alpha H has an eigenvalue with nonpositive real part.
  bool unbounded = false;
};

// alpha (L - alpha H)^{-1} (I - exp(-t (L - alpha H))) (h + H* zbar), the
// exact mean response under Poisson jumps with eta = 1 and g = 1.
PerturbedMean ou_exact_perturbed_mean(const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha,
                                      const std::vector<double>& tgrid);

// alpha L^{-1} (I - exp(-t L)) (h + H* zbar), the leading-order response.
ResponseCurve ou_leading_order_mean(const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha,
                                    const std::vector<double>& tgrid);

// alpha ((L - alpha H)^{-1} - L^{-1}) (h + H* zbar): infinite-time gap
// between the exact and leading-order mean responses.
Vector leading_order_gap(const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha);

}  // namespace jumpresp
