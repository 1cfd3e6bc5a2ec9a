#include "jumpresp/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "jumpresp/errors.hpp"

namespace jumpresp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

std::string dims(Eigen::Index a, Eigen::Index b) {
  std::ostringstream os;
  os << a << " vs " << b;
  return os.str();
}

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) throw ValidationError(std::string("dimension mismatch for ") + what + ": " + dims(got, want));
}

// Probability weights may contain zeros (an inactive component) as long as
// they sum to one; unnormalized weights must be strictly positive.
void require_weights(const std::vector<double>& w, bool normalized, const char* what) {
  if (w.empty()) throw ValidationError(std::string(what) + ": no components");
  double sum = 0.0;
  for (double v : w) {
    const bool ok = normalized ? v >= 0.0 : v > 0.0;
    if (!ok || !std::isfinite(v)) {
      throw ValidationError(std::string(what) + (normalized ? ": weights must be nonnegative" : ": weights must be positive"));
    }
    sum += v;
  }
  if (normalized && std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": weights sum to " << sum << ", expected 1";
    throw ValidationError(os.str());
  }
}

double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

}  // namespace

// --- Trajectory ---------------------------------------------------------------

Trajectory::Trajectory(double dt, StateMatrix states, TrajectoryOrigin origin)
    : dt_(dt), states_(std::move(states)), origin_(std::move(origin)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ValidationError("trajectory dt must be positive");
  if (states_.rows() < 2) throw ValidationError("trajectory needs at least 2 samples");
  if (states_.cols() < 1) throw ValidationError("trajectory state dimension must be >= 1");
  for (Eigen::Index r = 0; r < states_.rows(); ++r) {
    if (!states_.row(r).allFinite()) {
      throw ValidationError("trajectory row " + std::to_string(r) + " is not finite");
    }
  }
}

Trajectory Trajectory::tail(Eigen::Index count) const {
  if (count < 0 || size() - count < 2) throw ValidationError("cannot drop that many samples");
  return Trajectory(dt_, states_.bottomRows(size() - count), origin_);
}

// --- GaussianDensity -----------------------------------------------------------

GaussianDensity::GaussianDensity(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  const Eigen::Index K = mean_.size();
  if (K < 1) throw ValidationError("Gaussian density needs dimension >= 1");
  if (cov_.rows() != K || cov_.cols() != K) {
    throw ValidationError("covariance shape does not match mean dimension " + std::to_string(K));
  }
  if (!mean_.allFinite() || !cov_.allFinite()) throw ValidationError("Gaussian parameters must be finite");
  const double scale = std::max(cov_.norm(), std::numeric_limits<double>::min());
  if ((cov_ - cov_.transpose()).norm() > 1e-12 * scale) throw NotPositiveDefinite("covariance is not symmetric");
  llt_.compute(cov_);
  if (llt_.info() != Eigen::Success) throw NotPositiveDefinite("covariance is not positive definite");
  chol_lower_ = llt_.matrixL();
  if ((chol_lower_.diagonal().array() <= 0.0).any()) throw NotPositiveDefinite("covariance is not positive definite");
  log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
  precision_ = llt_.solve(Matrix::Identity(K, K));
  log_norm_ = -0.5 * (static_cast<double>(K) * kLog2Pi + log_det_);
}

double GaussianDensity::mahalanobis2(const Eigen::Ref<const Vector>& x) const {
  require_dim(x.size(), dim(), "Gaussian density argument");
  const Vector u = llt_.matrixL().solve(x - mean_);
  return u.squaredNorm();
}

double GaussianDensity::log_pdf(const Eigen::Ref<const Vector>& x) const {
  return log_norm_ - 0.5 * mahalanobis2(x);
}

double GaussianDensity::pdf(const Eigen::Ref<const Vector>& x) const { return std::exp(log_pdf(x)); }

Vector GaussianDensity::sample(Rng& rng) const { return mean_ + chol_lower_ * standard_normal(rng, dim()); }

// --- GaussianMixture -----------------------------------------------------------

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<GaussianDensity> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.size() != components_.size()) throw ValidationError("mixture weights and components differ in count");
  require_weights(weights_, true, "Gaussian mixture");
  for (const auto& c : components_) require_dim(c.dim(), components_.front().dim(), "mixture component");
  log_weights_.reserve(weights_.size());
  for (double w : weights_) log_weights_.push_back(std::log(w));
}

double GaussianMixture::log_pdf(const Eigen::Ref<const Vector>& x) const {
  if (components_.size() == 1) return log_weights_[0] + components_[0].log_pdf(x);
  std::vector<double> terms(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) terms[i] = log_weights_[i] + components_[i].log_pdf(x);
  return log_sum_exp(terms);
}

double GaussianMixture::pdf(const Eigen::Ref<const Vector>& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) acc += weights_[i] * components_[i].pdf(x);
  return acc;
}

Vector GaussianMixture::mean() const {
  Vector m = Vector::Zero(dim());
  for (std::size_t i = 0; i < components_.size(); ++i) m += weights_[i] * components_[i].mean();
  return m;
}

Vector GaussianMixture::sample(Rng& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  return components_[pick(rng)].sample(rng);
}

Eigen::Index density_dim(const Density& density) {
  return std::visit([](const auto& d) { return d.dim(); }, density);
}

double eval_density(const Density& density, const Eigen::Ref<const Vector>& x) {
  return std::visit([&](const auto& d) { return d.pdf(x); }, density);
}

double log_density(const Density& density, const Eigen::Ref<const Vector>& x) {
  return std::visit([&](const auto& d) { return d.log_pdf(x); }, density);
}

std::vector<std::pair<double, const GaussianDensity*>> density_components(const Density& density) {
  std::vector<std::pair<double, const GaussianDensity*>> out;
  if (const auto* g = std::get_if<GaussianDensity>(&density)) {
    out.emplace_back(1.0, g);
  } else {
    const auto& mix = std::get<GaussianMixture>(density);
    for (std::size_t i = 0; i < mix.size(); ++i) out.emplace_back(mix.weights()[i], &mix.components()[i]);
  }
  return out;
}

// --- Moments and fits ----------------------------------------------------------

MomentEstimate estimate_moments(const Trajectory& traj) {
  const auto& X = traj.states();
  const double n = static_cast<double>(X.rows());
  MomentEstimate est;
  est.mean = X.colwise().mean().transpose();
  const StateMatrix centered = X.rowwise() - est.mean.transpose();
  est.cov = (centered.transpose() * centered) / (n - 1.0);
  est.cov = 0.5 * (est.cov + est.cov.transpose());
  Eigen::LLT<Matrix> llt(est.cov);
  est.degenerate = llt.info() != Eigen::Success;
  if (!est.degenerate) {
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    const double scale = std::max(est.cov.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    est.degenerate = (diag.array().square() <= 1e-14 * scale).any();
  }
  return est;
}

GaussianDensity fit_quasi_gaussian(const Trajectory& traj) {
  const MomentEstimate est = estimate_moments(traj);
  if (est.degenerate) {
    throw ValidationError("sample covariance of the trajectory is degenerate; cannot form a quasi-Gaussian p0");
  }
  return GaussianDensity(est.mean, est.cov);
}

GaussianMixture fit_gaussian_mixture(const Trajectory& traj, int components, int max_iterations,
                                     Eigen::Index max_samples) {
  if (components < 1) throw ValidationError("mixture fit needs at least one component");
  const Eigen::Index stride = std::max<Eigen::Index>(1, traj.size() / std::max<Eigen::Index>(1, max_samples));
  const Eigen::Index n = (traj.size() + stride - 1) / stride;
  const Eigen::Index K = traj.dim();
  if (n < 10 * components * (K + 1)) throw ValidationError("too few samples for the requested mixture fit");
  StateMatrix X(n, K);
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) = traj.states().row(i * stride);

  const MomentEstimate global = estimate_moments(Trajectory(traj.dt(), X));
  if (global.degenerate) throw ValidationError("sample covariance is degenerate; cannot fit a mixture");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(global.cov);
  const Vector axis = eig.eigenvectors().col(K - 1);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Vector proj = X * axis;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return proj[a] < proj[b]; });

  // Responsibilities, initialized as hard slab assignments.
  Matrix resp = Matrix::Zero(n, components);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index slab = std::min<Eigen::Index>(components - 1, r * components / n);
    resp(order[static_cast<std::size_t>(r)], slab) = 1.0;
  }
  const Matrix ridge = 1e-9 * global.cov.diagonal().maxCoeff() * Matrix::Identity(K, K);

  std::vector<double> weights(static_cast<std::size_t>(components));
  std::vector<GaussianDensity> comps;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iterations; ++iter) {
    // M step
    comps.clear();
    for (int c = 0; c < components; ++c) {
      const double nk = resp.col(c).sum();
      if (nk < static_cast<double>(K + 1)) throw NumericalError("mixture fit collapsed a component");
      Vector mean = (X.transpose() * resp.col(c)) / nk;
      const StateMatrix centered = X.rowwise() - mean.transpose();
      Matrix cov = (centered.transpose() * resp.col(c).asDiagonal() * centered) / nk + ridge;
      cov = 0.5 * (cov + cov.transpose());
      weights[static_cast<std::size_t>(c)] = nk / static_cast<double>(n);
      comps.emplace_back(std::move(mean), std::move(cov));
    }
    // E step
    double ll = 0.0;
    std::vector<double> terms(static_cast<std::size_t>(components));
    for (Eigen::Index r = 0; r < n; ++r) {
      const Vector x = X.row(r).transpose();
      for (int c = 0; c < components; ++c) {
        terms[static_cast<std::size_t>(c)] = std::log(weights[static_cast<std::size_t>(c)]) + comps[static_cast<std::size_t>(c)].log_pdf(x);
      }
      const double lse = log_sum_exp(terms);
      ll += lse;
      for (int c = 0; c < components; ++c) resp(r, c) = std::exp(terms[static_cast<std::size_t>(c)] - lse);
    }
    if (std::abs(ll - prev_ll) <= 1e-10 * std::abs(ll)) break;
    prev_ll = ll;
  }
  // Renormalize so the probability-mixture invariant holds to rounding.
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return GaussianMixture(std::move(weights), std::move(comps));
}

// --- AffineJumpMap -------------------------------------------------------------

AffineJumpMap::AffineJumpMap(Vector h, Matrix H, Matrix Hstar)
    : h_(std::move(h)), H_(std::move(H)), Hstar_(std::move(Hstar)) {
  const Eigen::Index K = h_.size();
  if (K < 1) throw ValidationError("jump map needs dimension >= 1");
  if (H_.rows() != K || H_.cols() != K) throw ValidationError("jump map H must be K x K");
  if (Hstar_.rows() != K && Hstar_.size() != 0) throw ValidationError("jump map H* must have K rows");
  if (Hstar_.size() == 0) Hstar_.resize(K, Hstar_.cols());
  if (!h_.allFinite() || !H_.allFinite() || !Hstar_.allFinite()) throw ValidationError("jump map must be finite");

  const Matrix IpH = Matrix::Identity(K, K) + H_;
  Eigen::PartialPivLU<Matrix> lu(IpH);
  const double det = lu.determinant();
  // Hadamard bound: |det| <= product of column norms.
  double scale = 1.0;
  for (Eigen::Index c = 0; c < K; ++c) scale *= IpH.col(c).norm();
  if (!(std::abs(det) > 1e-12 * scale)) {
    throw NonInvertibleJump("jump map is not invertible: I + H is singular");
  }
  abs_det_ = std::abs(det);
  inverse_linear_ = lu.inverse();
}

AffineJumpMap AffineJumpMap::deterministic(Vector h, Matrix H) {
  const Eigen::Index K = h.size();
  return AffineJumpMap(std::move(h), std::move(H), Matrix(K, 0));
}

AffineJumpMap AffineJumpMap::shift(Vector h) {
  const Eigen::Index K = h.size();
  return deterministic(std::move(h), Matrix::Zero(K, K));
}

bool AffineJumpMap::z_coupled() const { return Hstar_.cols() > 0 && !Hstar_.isZero(0.0); }

StateVector apply_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) {
  require_dim(x.size(), map.dim(), "jump argument x");
  require_dim(z.size(), map.noise_dim(), "jump argument z");
  StateVector out = x + map.h() + map.H() * x;
  if (z.size() > 0) out.noalias() += map.Hstar() * z;
  return out;
}

StateVector apply_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x) {
  return apply_jump(map, x, Vector::Zero(map.noise_dim()));
}

InverseJump invert_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) {
  require_dim(x.size(), map.dim(), "jump argument x");
  require_dim(z.size(), map.noise_dim(), "jump argument z");
  Vector rhs = x - map.h();
  if (z.size() > 0) rhs.noalias() -= map.Hstar() * z;
  return InverseJump{map.inverse_linear() * rhs, 1.0 / map.abs_det()};
}

InverseJump invert_jump(const AffineJumpMap& map, const Eigen::Ref<const Vector>& x) {
  return invert_jump(map, x, Vector::Zero(map.noise_dim()));
}

// --- Jump laws -----------------------------------------------------------------

DiscreteLaw::DiscreteLaw(std::vector<Vector> atoms, std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
  if (atoms_.size() != probs_.size()) throw ValidationError("discrete law: atoms and probabilities differ in count");
  require_weights(probs_, true, "discrete law");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    require_dim(atoms_[i].size(), atoms_.front().size(), "discrete law atom");
    if (!atoms_[i].allFinite()) throw ValidationError("discrete law atoms must be finite");
    for (std::size_t j = 0; j < i; ++j) {
      if (atoms_[i] == atoms_[j]) throw ValidationError("discrete law atoms must be distinct");
    }
  }
}

Eigen::Index law_dim(const JumpLaw& law) {
  return std::visit([](const auto& l) { return l.dim(); }, law);
}

Vector law_mean(const JumpLaw& law) {
  if (const auto* d = std::get_if<DiscreteLaw>(&law)) {
    Vector m = Vector::Zero(d->dim());
    for (std::size_t j = 0; j < d->atoms().size(); ++j) m += d->probs()[j] * d->atoms()[j];
    return m;
  }
  if (const auto* g = std::get_if<GaussianDensity>(&law)) return g->mean();
  return std::get<GaussianMixture>(law).mean();
}

Vector sample_law(const JumpLaw& law, Rng& rng) {
  if (const auto* d = std::get_if<DiscreteLaw>(&law)) {
    if (d->probs().size() == 1) return d->atoms().front();
    std::discrete_distribution<std::size_t> pick(d->probs().begin(), d->probs().end());
    return d->atoms()[pick(rng)];
  }
  if (const auto* g = std::get_if<GaussianDensity>(&law)) return g->sample(rng);
  return std::get<GaussianMixture>(law).sample(rng);
}

// --- Intensity -----------------------------------------------------------------

TimeProfile TimeProfile::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError("eta must be positive and finite");
  TimeProfile p;
  p.value_ = value;
  p.supremum_ = value;
  return p;
}

TimeProfile TimeProfile::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw ValidationError("eta table is empty");
  TimeProfile p;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [t, v] = points[i];
    if (!std::isfinite(t) || !(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("eta table entry " + std::to_string(i) + " must have finite t and positive eta");
    }
    if (i > 0 && !(t > points[i - 1].first)) throw ValidationError("eta table times must be strictly increasing");
  }
  p.supremum_ = 0.0;
  for (const auto& pt : points) p.supremum_ = std::max(p.supremum_, pt.second);
  p.value_ = points.front().second;
  p.points_ = std::move(points);
  return p;
}

double TimeProfile::operator()(double t) const {
  if (points_.empty()) return value_;
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  auto lo = hi - 1;
  const double frac = (t - lo->first) / (hi->first - lo->first);
  return lo->second + frac * (hi->second - lo->second);
}

IntensityShape IntensityShape::constant() { return IntensityShape{}; }

IntensityShape IntensityShape::bump(Vector center, Matrix cov) {
  IntensityShape s;
  s.kind_ = Kind::kBump;
  s.weights_ = {1.0};
  s.bumps_.emplace_back(std::move(center), std::move(cov));
  return s;
}

IntensityShape IntensityShape::bump_mixture(std::vector<double> weights, std::vector<GaussianDensity> bumps) {
  if (weights.size() != bumps.size()) throw ValidationError("bump mixture: weights and bumps differ in count");
  require_weights(weights, false, "bump mixture");
  for (const auto& b : bumps) require_dim(b.dim(), bumps.front().dim(), "bump mixture component");
  IntensityShape s;
  s.kind_ = Kind::kBumpMixture;
  s.weights_ = std::move(weights);
  s.bumps_ = std::move(bumps);
  return s;
}

double IntensityShape::operator()(const Eigen::Ref<const Vector>& x) const {
  if (kind_ == Kind::kConstant) return 1.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < bumps_.size(); ++k) acc += weights_[k] * std::exp(-0.5 * bumps_[k].mahalanobis2(x));
  return acc;
}

double IntensityShape::supremum() const {
  if (kind_ == Kind::kBumpMixture) return std::accumulate(weights_.begin(), weights_.end(), 0.0);
  return 1.0;
}

IntensityModel::IntensityModel(double alpha, TimeProfile eta, IntensityShape gshape)
    : alpha_(alpha), eta_(std::move(eta)), gshape_(std::move(gshape)) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw ValidationError("intensity alpha must be positive");
}

// --- Collision -----------------------------------------------------------------

void CollisionJumpSpec::validate(Eigen::Index K) const {
  const std::size_t d = idx_y.size();
  if (d == 0 || idx_z.size() != d) throw ValidationError("collision index sets must be non-empty and of equal size");
  if (static_cast<Eigen::Index>(2 * d) > K) throw ValidationError("collision index sets exceed the state dimension");
  std::vector<int> all(idx_y);
  all.insert(all.end(), idx_z.begin(), idx_z.end());
  for (int i : all) {
    if (i < 0 || i >= K) throw ValidationError("collision index " + std::to_string(i) + " out of range");
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw ValidationError("collision index sets must be disjoint");
  }
  if (n) {
    if (n->size() != static_cast<Eigen::Index>(d)) throw ValidationError("collision direction has wrong dimension");
    if (std::abs(n->norm() - 1.0) > 1e-12) throw ValidationError("collision direction must be a unit vector");
  }
}

StateVector collision_transform(const CollisionJumpSpec& spec, const Eigen::Ref<const Vector>& x, Rng& rng) {
  spec.validate(x.size());
  const auto d = static_cast<Eigen::Index>(spec.idx_y.size());
  Vector y(d), z(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    y[i] = x[spec.idx_y[static_cast<std::size_t>(i)]];
    z[i] = x[spec.idx_z[static_cast<std::size_t>(i)]];
  }
  Vector n;
  if (spec.n) {
    n = *spec.n;
  } else {
    do {
      n = standard_normal(rng, d);
    } while (n.norm() == 0.0);
    n.normalize();
  }
  const double proj = (z - y).dot(n);
  StateVector out = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    out[spec.idx_y[static_cast<std::size_t>(i)]] = y[i] + proj * n[i];
    out[spec.idx_z[static_cast<std::size_t>(i)]] = z[i] - proj * n[i];
  }
  return out;
}

}  // namespace jumpresp
