#include "jumpresp/analytic_oracle.hpp"

#include <cmath>

#include "jumpresp/errors.hpp"

namespace jumpresp {

namespace {

void check_map(const OUParams& ou, const AffineJumpMap& map) {
  if (map.dim() != ou.dim()) throw ValidationError("jump map dimension does not match the OU process");
}

Vector jump_mean(const AffineJumpMap& map, const Vector& zbar) {
  if (zbar.size() != map.noise_dim()) throw ValidationError("mean jump value has wrong dimension");
  Vector v = map.h();
  if (zbar.size() > 0) v.noalias() += map.Hstar() * zbar;
  return v;
}

// exp(-tau L) v on every grid time.
ResponseCurve propagate(const OUParams& ou, const Vector& v, const std::vector<double>& tgrid) {
  ResponseCurve curve;
  curve.lags = tgrid;
  const auto n = static_cast<Eigen::Index>(tgrid.size());
  curve.values.resize(n, ou.dim());
  curve.std_error = Matrix::Zero(n, ou.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    curve.values.row(i) = (matrix_exponential(-ou.L(), tgrid[static_cast<std::size_t>(i)]) * v).transpose();
  }
  return curve;
}

Matrix checked_inverse(const Matrix& A, const char* what) {
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw NumericalError(std::string(what) + " is singular");
  return lu.inverse();
}

}  // namespace

OUParams::OUParams(Matrix L, Matrix G) : L_(std::move(L)), G_(std::move(G)) {
  const Eigen::Index K = L_.rows();
  if (K < 1 || L_.cols() != K || G_.rows() != K || G_.cols() != K) throw ValidationError("OU: L and G must be K x K");
  Eigen::LLT<Matrix> llt(G_ * G_.transpose());
  if (llt.info() != Eigen::Success) throw ValidationError("OU: G G^T must be positive definite");
  cov_ = solve_lyapunov(L_, G_ * G_.transpose());
}

ResponseCurve ou_mean_response_det(const OUParams& ou, const AffineJumpMap& map, const std::vector<double>& tgrid) {
  check_map(ou, map);
  if (map.z_coupled()) throw ValidationError("deterministic OU response needs a z-free jump map");
  return propagate(ou, map.h(), tgrid);
}

ResponseCurve ou_mean_response_random(const OUParams& ou, const AffineJumpMap& map, const JumpLaw& law,
                                      const std::vector<double>& tgrid) {
  check_map(ou, map);
  return propagate(ou, jump_mean(map, law_mean(law)), tgrid);
}

ShapeMoments ou_shape_moments(const OUParams& ou, const IntensityShape& gshape) {
  const Eigen::Index K = ou.dim();
  if (gshape.is_constant()) return ShapeMoments{1.0, Vector::Zero(K)};
  const Matrix& C = ou.cov();
  const Matrix Cinv = checked_inverse(C, "OU covariance");
  ShapeMoments out{0.0, Vector::Zero(K)};
  for (std::size_t k = 0; k < gshape.bumps().size(); ++k) {
    const GaussianDensity& bump = gshape.bumps()[k];
    if (bump.dim() != K) throw ValidationError("intensity shape dimension does not match the OU process");
    // g = (2 pi)^{K/2} sqrt(det C_g) N(x; m_g, C_g), and
    // int N(x; 0, C) N(x; m_g, C_g) dx = N(m_g; 0, C + C_g).
    const GaussianDensity joint(Vector::Zero(K), C + bump.cov());
    const double log_mass = 0.5 * static_cast<double>(K) * std::log(2.0 * std::acos(-1.0)) +
                            0.5 * bump.log_det_cov() + joint.log_pdf(bump.mean());
    const double mass = gshape.weights()[k] * std::exp(log_mass);
    // The product density has mean (C^{-1} + C_g^{-1})^{-1} C_g^{-1} m_g.
    const Matrix post_prec = Cinv + bump.precision();
    const Vector post_mean = post_prec.llt().solve(bump.precision() * bump.mean());
    out.mass += mass;
    out.first += mass * post_mean;
  }
  return out;
}

ResponseCurve ou_response_operator(const OUParams& ou, const AffineJumpMap& map, const JumpLaw& law,
                                   const IntensityShape& gshape, const std::vector<double>& tgrid) {
  check_map(ou, map);
  if (gshape.is_constant()) return ou_mean_response_random(ou, map, law, tgrid);
  const ShapeMoments mom = ou_shape_moments(ou, gshape);
  const Vector v = jump_mean(map, law_mean(law)) * mom.mass + map.H() * mom.first;
  return propagate(ou, v, tgrid);
}

PerturbedMean ou_exact_perturbed_mean(const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha,
                                      const std::vector<double>& tgrid) {
  check_map(ou, map);
  const Eigen::Index K = ou.dim();
  PerturbedMean out;
  out.curve.lags = tgrid;
  const auto n = static_cast<Eigen::Index>(tgrid.size());
  out.curve.values = Matrix::Zero(n, K);
  out.curve.std_error = Matrix::Zero(n, K);
  if (alpha == 0.0) return out;
  const Matrix Lp = ou.L() - alpha * map.H();
  const Matrix Lp_inv = checked_inverse(Lp, "L - alpha H");
  out.unbounded = !(min_real_eigenvalue(Lp) > 0.0);
  const Vector v = jump_mean(map, zbar);
  const Matrix I = Matrix::Identity(K, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix E = matrix_exponential(-Lp, tgrid[static_cast<std::size_t>(i)]);
    out.curve.values.row(i) = (alpha * Lp_inv * (I - E) * v).transpose();
  }
  return out;
}

ResponseCurve ou_leading_order_mean(const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha,
                                    const std::vector<double>& tgrid) {
  check_map(ou, map);
  const Eigen::Index K = ou.dim();
  const Matrix L_inv = checked_inverse(ou.L(), "L");
  const Vector v = jump_mean(map, zbar);
  ResponseCurve curve;
  curve.lags = tgrid;
  const auto n = static_cast<Eigen::Index>(tgrid.size());
  curve.values.resize(n, K);
  curve.std_error = Matrix::Zero(n, K);
  const Matrix I = Matrix::Identity(K, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix E = matrix_exponential(-ou.L(), tgrid[static_cast<std::size_t>(i)]);
    curve.values.row(i) = (alpha * L_inv * (I - E) * v).transpose();
  }
  return curve;
}

Vector leading_order_gap(const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha) {
  check_map(ou, map);
  const Matrix Lp_inv = checked_inverse(ou.L() - alpha * map.H(), "L - alpha H");
  const Matrix L_inv = checked_inverse(ou.L(), "L");
  return alpha * (Lp_inv - L_inv) * jump_mean(map, zbar);
}

}  // namespace jumpresp
