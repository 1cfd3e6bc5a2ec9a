#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "jumpresp/core_model.hpp"
#include "jumpresp/errors.hpp"

namespace jumpresp {

// dx = -L x dt + G dW
struct OUModel {
  Matrix L;
  Matrix G;
};

// dx = (x - x^3) dt + sigma dW, K = 1
struct DoubleWellModel {
  double sigma;
};

// dx_i = ((x_{i+1} - x_{i-2}) x_{i-1} - x_i + F) dt + sigma dW_i
struct Lorenz96Model {
  int K;
  double forcing;
  double sigma;
};

class ModelSpec {
 public:
  static ModelSpec ou(Matrix L, Matrix G);
  static ModelSpec double_well(double sigma);
  static ModelSpec lorenz96(int K, double forcing, double sigma = 0.0);

  Eigen::Index dim() const;
  std::string name() const;
  bool is_ou() const { return std::holds_alternative<OUModel>(model_); }
  const OUModel& ou_params() const;

  void drift(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  // Adds G(x) * xi * scale to out.
  void add_diffusion(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& xi, double scale,
                     Eigen::Ref<Vector> out) const;
  // Dimension of the driving Brownian motion.
  Eigen::Index noise_dim() const { return dim(); }

 private:
  explicit ModelSpec(std::variant<OUModel, DoubleWellModel, Lorenz96Model> m) : model_(std::move(m)) {}
  std::variant<OUModel, DoubleWellModel, Lorenz96Model> model_;
};

// One Euler-Maruyama step x <- x + f(x) dt + G(x) sqrt(dt) xi.
class EulerMaruyama {
 public:
  EulerMaruyama(const ModelSpec& model, double dt);

  void step(Vector& x, const Eigen::Ref<const Vector>& xi);
  double dt() const { return dt_; }

 private:
  const ModelSpec* model_;
  double dt_;
  double sqrt_dt_;
  Vector drift_;
};

// x_{k+1} = x_k + f(x_k) dt + G(x_k) sqrt(dt) xi_k. Deterministic given the seed.
Trajectory simulate_unperturbed(const ModelSpec& model, const Eigen::Ref<const Vector>& x0, double dt,
                                std::int64_t nsteps, std::uint64_t seed);

// Exact OU transition over one step dt: x' = Phi x + noise_factor * xi.
struct OUTransition {
  Matrix phi;           // exp(-L dt)
  Matrix step_cov;      // C - Phi C Phi^T
  Matrix noise_factor;  // any S with S S^T = step_cov
};

// Stationary covariance C of dx = -L x dt + G dW, solving L C + C L^T = G G^T.
Matrix ou_stationary_covariance(const Matrix& L, const Matrix& G);
// dt = 0 gives the identity kernel with zero noise.
OUTransition ou_transition(const Matrix& L, const Matrix& G, double dt);

// Statistically exact OU sampling for any dt > 0.
Trajectory simulate_ou_exact(const Matrix& L, const Matrix& G, const Eigen::Ref<const Vector>& x0, double dt,
                             std::int64_t nsteps, std::uint64_t seed);

struct StationarySampling {
  double dt = 0.01;
  std::int64_t burn_in = 10000;
  std::int64_t thin = 100;
  // Start of the burn-in chain; zero vector when empty.
  Vector x0;
};

// Draws from p0: exact N(0, C) for OU, otherwise one Euler-Maruyama chain
// recording every thin-th state after the burn-in.
std::vector<StateVector> sample_stationary(const ModelSpec& model, std::int64_t nsamples, std::uint64_t seed,
                                           const StationarySampling& opts = {});

// Ogata thinning with dominating rate alpha * sup eta * sup g. `state_at(s)`
// returns the state x(s-) used in the acceptance ratio. Returns the first
// accepted time in (t, t_max], or nothing.
template <class StateAccessor>
std::optional<double> next_jump_time(const IntensityModel& intensity, StateAccessor&& state_at, double t,
                                     double t_max, Rng& rng) {
  const double bound = intensity.dominating_rate();
  if (!(bound > 0.0) || !std::isfinite(bound)) throw ValidationError("thinning needs a finite positive dominating rate");
  std::exponential_distribution<double> gap(bound);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double s = t;
  while (true) {
    s += gap(rng);
    if (!(s <= t_max)) return std::nullopt;
    const double accept = intensity.rate(s, state_at(s)) / bound;
    if (unif(rng) < accept) return s;
  }
}

struct JumpEvent {
  double time;  // accepted jump time (continuous)
  StateVector pre_state;
  Vector z;
  StateVector post_state;
};

struct PerturbedRun {
  Trajectory trajectory;
  std::vector<JumpEvent> events;
};

// Applies the random-time jumps falling in (t, t + dt] to x, which holds the
// state at t + dt after its diffusion step. `intensity_state` is the state
// used in the intensity before the first jump of the interval.
void apply_interval_jumps(const AffineJumpMap& map, const JumpLaw& law, const IntensityModel& intensity,
                          double t, double dt, const Vector& intensity_state, Vector& x, Rng& time_rng,
                          Rng& size_rng, std::vector<JumpEvent>* events);

// Euler-Maruyama between jumps; a jump accepted in (t_k, t_{k+1}] is applied
// to the grid state at t_{k+1}. Uses the same diffusion stream as
// simulate_unperturbed with the same seed.
PerturbedRun simulate_perturbed(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw& law,
                                const IntensityModel& intensity, const Eigen::Ref<const Vector>& x0, double dt,
                                std::int64_t nsteps, std::uint64_t seed);

}  // namespace jumpresp
