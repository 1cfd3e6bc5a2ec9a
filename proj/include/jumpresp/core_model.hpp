#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jumpresp/rng.hpp"
#include "jumpresp/types.hpp"

namespace jumpresp {

// Row-major so that one state x(s) is contiguous.
using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TrajectoryOrigin {
  std::string model;
  std::uint64_t seed = 0;
  std::int64_t burn_in = 0;
};

// Uniformly sampled time series x(0), x(dt), ..., x((N-1)dt).
class Trajectory {
 public:
  Trajectory(double dt, StateMatrix states, TrajectoryOrigin origin = {});

  double dt() const { return dt_; }
  Eigen::Index size() const { return states_.rows(); }
  Eigen::Index dim() const { return states_.cols(); }
  const StateMatrix& states() const { return states_; }
  const TrajectoryOrigin& origin() const { return origin_; }

  Eigen::Map<const Vector> state(Eigen::Index s) const {
    return Eigen::Map<const Vector>(states_.row(s).data(), states_.cols());
  }

  // Drops the first `count` samples.
  Trajectory tail(Eigen::Index count) const;

 private:
  double dt_;
  StateMatrix states_;
  TrajectoryOrigin origin_;
};

// Multivariate normal N(mean, cov). The Cholesky factor is computed once at
// construction; a covariance that fails it raises NotPositiveDefinite.
class GaussianDensity {
 public:
  GaussianDensity(Vector mean, Matrix cov);

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  const Matrix& precision() const { return precision_; }
  const Matrix& chol_lower() const { return chol_lower_; }
  double log_det_cov() const { return log_det_; }

  double mahalanobis2(const Eigen::Ref<const Vector>& x) const;
  double log_pdf(const Eigen::Ref<const Vector>& x) const;
  double pdf(const Eigen::Ref<const Vector>& x) const;
  Vector sample(Rng& rng) const;

 private:
  Vector mean_;
  Matrix cov_;
  Eigen::LLT<Matrix> llt_;
  Matrix chol_lower_;
  Matrix precision_;
  double log_det_ = 0.0;
  double log_norm_ = 0.0;
};

// Probability mixture sum_i w_i N(m_i, C_i), weights positive and summing to 1.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<GaussianDensity> components);

  Eigen::Index dim() const { return components_.front().dim(); }
  std::size_t size() const { return components_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianDensity>& components() const { return components_; }

  // Log-sum-exp over components.
  double log_pdf(const Eigen::Ref<const Vector>& x) const;
  double pdf(const Eigen::Ref<const Vector>& x) const;
  Vector mean() const;
  Vector sample(Rng& rng) const;

 private:
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<GaussianDensity> components_;
};

using Density = std::variant<GaussianDensity, GaussianMixture>;

Eigen::Index density_dim(const Density& density);
double eval_density(const Density& density, const Eigen::Ref<const Vector>& x);
double log_density(const Density& density, const Eigen::Ref<const Vector>& x);
// The density as a list of weighted Gaussian components.
std::vector<std::pair<double, const GaussianDensity*>> density_components(const Density& density);

struct MomentEstimate {
  Vector mean;
  Matrix cov;
  // Set when the sample covariance is not positive definite.
  bool degenerate = false;
};

// Sample mean and unbiased sample covariance over trajectory rows.
MomentEstimate estimate_moments(const Trajectory& traj);

// Quasi-Gaussian p0: N(sample mean, sample covariance). Throws
// ValidationError if the sample covariance is degenerate.
GaussianDensity fit_quasi_gaussian(const Trajectory& traj);

// Maximum-likelihood Gaussian mixture by EM, initialized by splitting the
// samples into equal-count slabs along the leading principal axis.
// `max_samples` caps the number of rows used (uniform stride).
GaussianMixture fit_gaussian_mixture(const Trajectory& traj, int components, int max_iterations = 500,
                                     Eigen::Index max_samples = 200000);

// x -> x + h + H x + H* z. An empty H* (d = 0) is a purely deterministic jump.
class AffineJumpMap {
 public:
  AffineJumpMap(Vector h, Matrix H, Matrix Hstar);
  static AffineJumpMap deterministic(Vector h, Matrix H);
  static AffineJumpMap shift(Vector h);

  Eigen::Index dim() const { return h_.size(); }
  Eigen::Index noise_dim() const { return Hstar_.cols(); }
  const Vector& h() const { return h_; }
  const Matrix& H() const { return H_; }
  const Matrix& Hstar() const { return Hstar_; }
  // |det(I + H)|
  double abs_det() const { return abs_det_; }
  // True when the jump actually depends on z.
  bool z_coupled() const;
  // (I + H)^{-1}
  const Matrix& inverse_linear() const { return inverse_linear_; }

 private:
  Vector h_;
  Matrix H_;
  Matrix Hstar_;
  Matrix inverse_linear_;
  double abs_det_ = 1.0;
};

StateVector apply_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& z);
StateVector apply_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x);

struct InverseJump {
  StateVector xhat;
  // |d xhat / d x| = 1 / |det(I + H)|
  double jacobian;
};

InverseJump invert_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& z);
InverseJump invert_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x);

// Finite set of jump values z_j with probabilities gamma_j.
class DiscreteLaw {
 public:
  DiscreteLaw(std::vector<Vector> atoms, std::vector<double> probs);

  Eigen::Index dim() const { return atoms_.front().size(); }
  const std::vector<Vector>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<Vector> atoms_;
  std::vector<double> probs_;
};

using JumpLaw = std::variant<DiscreteLaw, GaussianDensity, GaussianMixture>;

Eigen::Index law_dim(const JumpLaw& law);
Vector law_mean(const JumpLaw& law);
Vector sample_law(const JumpLaw& law, Rng& rng);

// Time profile eta(t) of the jump intensity.
class TimeProfile {
 public:
  static TimeProfile constant(double value);
  // Piecewise-linear interpolation through (t, eta) points sorted by t;
  // held constant outside the table.
  static TimeProfile table(std::vector<std::pair<double, double>> points);

  double operator()(double t) const;
  double supremum() const { return supremum_; }
  bool is_constant() const { return points_.empty(); }

 private:
  TimeProfile() = default;
  double value_ = 1.0;
  std::vector<std::pair<double, double>> points_;
  double supremum_ = 1.0;
};

// State weight g(x) of the jump intensity: the constant 1, a Gaussian bump
// exp(-1/2 (x - m_g)^T C_g^{-1} (x - m_g)), or a positive combination of bumps.
class IntensityShape {
 public:
  enum class Kind { kConstant, kBump, kBumpMixture };

  static IntensityShape constant();
  static IntensityShape bump(Vector center, Matrix cov);
  static IntensityShape bump_mixture(std::vector<double> weights, std::vector<GaussianDensity> bumps);

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::kConstant; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianDensity>& bumps() const { return bumps_; }

  double operator()(const Eigen::Ref<const Vector>& x) const;
  // Analytic supremum: 1 for the constant and a single bump, sum of weights otherwise.
  double supremum() const;

 private:
  Kind kind_ = Kind::kConstant;
  std::vector<double> weights_;
  std::vector<GaussianDensity> bumps_;
};

// lambda(t) = alpha * eta(t) * g(x(t-)).
class IntensityModel {
 public:
  IntensityModel(double alpha, TimeProfile eta, IntensityShape gshape);

  double alpha() const { return alpha_; }
  const TimeProfile& eta() const { return eta_; }
  const IntensityShape& gshape() const { return gshape_; }

  double rate(double t, const Eigen::Ref<const Vector>& x) const { return alpha_ * eta_(t) * gshape_(x); }
  // alpha * sup eta * sup g
  double dominating_rate() const { return alpha_ * eta_.supremum() * gshape_.supremum(); }

 private:
  double alpha_;
  TimeProfile eta_;
  IntensityShape gshape_;
};

// Energy-preserving exchange between two disjoint groups of components.
struct CollisionJumpSpec {
  std::vector<int> idx_y;
  std::vector<int> idx_z;
  // Unit d-vector; empty optional draws a uniformly random unit vector.
  std::optional<Vector> n;

  void validate(Eigen::Index K) const;
};

StateVector collision_transform(const CollisionJumpSpec& spec, const Eigen::Ref<const Vector>& x, Rng& rng);

}  // namespace jumpresp
