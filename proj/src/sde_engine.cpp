#include "jumpresp/sde_engine.hpp"

#include <sstream>

#include "jumpresp/linalg.hpp"

namespace jumpresp {

namespace {

void check_step_args(double dt, std::int64_t nsteps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step dt must be positive");
  if (nsteps < 1) throw ValidationError("number of steps must be >= 1");
}

[[noreturn]] void blow_up(std::int64_t step) {
  throw NumericalError("numerical blow-up: non-finite state at step " + std::to_string(step));
}

}  // namespace

// --- ModelSpec -----------------------------------------------------------------

ModelSpec ModelSpec::ou(Matrix L, Matrix G) {
  const Eigen::Index K = L.rows();
  if (K < 1 || L.cols() != K || G.rows() != K || G.cols() != K) throw ValidationError("OU model: L and G must be K x K");
  if (!L.allFinite() || !G.allFinite()) throw ValidationError("OU model parameters must be finite");
  Eigen::LLT<Matrix> llt(G * G.transpose());
  if (llt.info() != Eigen::Success) throw ValidationError("OU model: G G^T must be positive definite");
  return ModelSpec(OUModel{std::move(L), std::move(G)});
}

ModelSpec ModelSpec::double_well(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("double-well sigma must be >= 0");
  return ModelSpec(DoubleWellModel{sigma});
}

ModelSpec ModelSpec::lorenz96(int K, double forcing, double sigma) {
  if (K < 4) throw ValidationError("Lorenz96 needs K >= 4");
  if (!(sigma >= 0.0) || !std::isfinite(forcing)) throw ValidationError("Lorenz96 needs finite forcing and sigma >= 0");
  return ModelSpec(Lorenz96Model{K, forcing, sigma});
}

Eigen::Index ModelSpec::dim() const {
  struct {
    Eigen::Index operator()(const OUModel& m) const { return m.L.rows(); }
    Eigen::Index operator()(const DoubleWellModel&) const { return 1; }
    Eigen::Index operator()(const Lorenz96Model& m) const { return m.K; }
  } visitor;
  return std::visit(visitor, model_);
}

std::string ModelSpec::name() const {
  struct {
    std::string operator()(const OUModel&) const { return "ou"; }
    std::string operator()(const DoubleWellModel&) const { return "double_well"; }
    std::string operator()(const Lorenz96Model&) const { return "lorenz96"; }
  } visitor;
  return std::visit(visitor, model_);
}

const OUModel& ModelSpec::ou_params() const {
  if (!is_ou()) throw ValidationError("model is not Ornstein-Uhlenbeck");
  return std::get<OUModel>(model_);
}

void ModelSpec::drift(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  if (const auto* ou = std::get_if<OUModel>(&model_)) {
    out.noalias() = -ou->L * x;
  } else if (std::holds_alternative<DoubleWellModel>(model_)) {
    out[0] = x[0] - x[0] * x[0] * x[0];
  } else {
    const auto& l96 = std::get<Lorenz96Model>(model_);
    const int K = l96.K;
    for (int i = 0; i < K; ++i) {
      const double xp1 = x[(i + 1) % K];
      const double xm1 = x[(i + K - 1) % K];
      const double xm2 = x[(i + K - 2) % K];
      out[i] = (xp1 - xm2) * xm1 - x[i] + l96.forcing;
    }
  }
}

void ModelSpec::add_diffusion(const Eigen::Ref<const Vector>&, const Eigen::Ref<const Vector>& xi, double scale,
                              Eigen::Ref<Vector> out) const {
  if (const auto* ou = std::get_if<OUModel>(&model_)) {
    out.noalias() += scale * (ou->G * xi);
  } else if (const auto* dw = std::get_if<DoubleWellModel>(&model_)) {
    out[0] += scale * dw->sigma * xi[0];
  } else {
    out += (scale * std::get<Lorenz96Model>(model_).sigma) * xi;
  }
}

EulerMaruyama::EulerMaruyama(const ModelSpec& model, double dt)
    : model_(&model), dt_(dt), sqrt_dt_(std::sqrt(dt)), drift_(model.dim()) {}

void EulerMaruyama::step(Vector& x, const Eigen::Ref<const Vector>& xi) {
  model_->drift(x, drift_);
  // The diffusion coefficient is evaluated at x_k, before the drift update.
  model_->add_diffusion(x, xi, sqrt_dt_, x);
  x.noalias() += dt_ * drift_;
}

// --- Unperturbed simulation ----------------------------------------------------

Trajectory simulate_unperturbed(const ModelSpec& model, const Eigen::Ref<const Vector>& x0, double dt,
                                std::int64_t nsteps, std::uint64_t seed) {
  check_step_args(dt, nsteps);
  const Eigen::Index K = model.dim();
  if (x0.size() != K) throw ValidationError("initial state has wrong dimension");
  StateMatrix states(nsteps + 1, K);
  Vector x = x0;
  Vector xi(model.noise_dim());
  EulerMaruyama em(model, dt);
  Rng noise = make_rng(seed, Stream::kDiffusion);
  states.row(0) = x.transpose();
  for (std::int64_t k = 0; k < nsteps; ++k) {
    fill_standard_normal(noise, xi);
    em.step(x, xi);
    if (!x.allFinite()) blow_up(k + 1);
    states.row(k + 1) = x.transpose();
  }
  return Trajectory(dt, std::move(states), TrajectoryOrigin{model.name(), seed, 0});
}

// --- Exact OU --------------------------------------------------------------------

Matrix ou_stationary_covariance(const Matrix& L, const Matrix& G) {
  return solve_lyapunov(L, G * G.transpose());
}

OUTransition ou_transition(const Matrix& L, const Matrix& G, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ValidationError("transition step must be >= 0");
  const Matrix C = ou_stationary_covariance(L, G);
  OUTransition tr;
  tr.phi = matrix_exponential(-L, dt);
  tr.step_cov = C - tr.phi * C * tr.phi.transpose();
  tr.step_cov = 0.5 * (tr.step_cov + tr.step_cov.transpose());
  tr.noise_factor = psd_factor(tr.step_cov);
  return tr;
}

Trajectory simulate_ou_exact(const Matrix& L, const Matrix& G, const Eigen::Ref<const Vector>& x0, double dt,
                             std::int64_t nsteps, std::uint64_t seed) {
  check_step_args(dt, nsteps);
  const Eigen::Index K = L.rows();
  if (x0.size() != K) throw ValidationError("initial state has wrong dimension");
  const OUTransition tr = ou_transition(L, G, dt);
  StateMatrix states(nsteps + 1, K);
  Vector x = x0;
  Vector xi(K);
  Vector next(K);
  Rng noise = make_rng(seed, Stream::kDiffusion);
  states.row(0) = x.transpose();
  for (std::int64_t k = 0; k < nsteps; ++k) {
    fill_standard_normal(noise, xi);
    next.noalias() = tr.phi * x;
    next.noalias() += tr.noise_factor * xi;
    x.swap(next);
    states.row(k + 1) = x.transpose();
  }
  return Trajectory(dt, std::move(states), TrajectoryOrigin{"ou_exact", seed, 0});
}

// --- Stationary sampling -------------------------------------------------------

std::vector<StateVector> sample_stationary(const ModelSpec& model, std::int64_t nsamples, std::uint64_t seed,
                                           const StationarySampling& opts) {
  if (nsamples < 0) throw ValidationError("nsamples must be >= 0");
  std::vector<StateVector> out;
  if (nsamples == 0) return out;
  out.reserve(static_cast<std::size_t>(nsamples));
  const Eigen::Index K = model.dim();

  if (model.is_ou()) {
    const auto& ou = model.ou_params();
    const GaussianDensity p0(Vector::Zero(K), ou_stationary_covariance(ou.L, ou.G));
    Rng rng = make_rng(seed, Stream::kInitial);
    for (std::int64_t i = 0; i < nsamples; ++i) out.push_back(p0.sample(rng));
    return out;
  }

  if (!(opts.dt > 0.0) || opts.burn_in < 0 || opts.thin < 1) {
    throw ValidationError("stationary sampling needs dt > 0, burn_in >= 0, thin >= 1");
  }
  Vector x = opts.x0.size() == K ? opts.x0 : Vector::Zero(K);
  if (opts.x0.size() == 0 && K > 1) x[0] = 0.01;  // off the symmetric fixed point
  Vector xi(model.noise_dim());
  EulerMaruyama em(model, opts.dt);
  Rng noise = make_rng(seed, Stream::kInitial);
  std::int64_t step = 0;
  for (; step < opts.burn_in; ++step) {
    fill_standard_normal(noise, xi);
    em.step(x, xi);
    if (!x.allFinite()) blow_up(step + 1);
  }
  for (std::int64_t i = 0; i < nsamples; ++i) {
    for (std::int64_t j = 0; j < opts.thin; ++j, ++step) {
      fill_standard_normal(noise, xi);
      em.step(x, xi);
      if (!x.allFinite()) blow_up(step + 1);
    }
    out.push_back(x);
  }
  return out;
}

// --- Perturbed simulation ------------------------------------------------------

void apply_interval_jumps(const AffineJumpMap& map, const JumpLaw& law, const IntensityModel& intensity,
                          double t, double dt, const Vector& intensity_state, Vector& x, Rng& time_rng,
                          Rng& size_rng, std::vector<JumpEvent>* events) {
  const Vector* current = &intensity_state;
  Vector post;
  double s = t;
  const double t_end = t + dt;
  while (true) {
    const auto accepted = next_jump_time(
        intensity, [&](double) -> const Vector& { return *current; }, s, t_end, time_rng);
    if (!accepted) return;
    s = *accepted;
    const Vector z = sample_law(law, size_rng);
    post = apply_jump(map, x, z);
    if (events) events->push_back(JumpEvent{s, x, z, post});
    x = post;
    current = &x;
  }
}

PerturbedRun simulate_perturbed(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw& law,
                                const IntensityModel& intensity, const Eigen::Ref<const Vector>& x0, double dt,
                                std::int64_t nsteps, std::uint64_t seed) {
  check_step_args(dt, nsteps);
  const Eigen::Index K = model.dim();
  if (x0.size() != K) throw ValidationError("initial state has wrong dimension");
  if (map.dim() != K) throw ValidationError("jump map dimension does not match the model");
  if (law_dim(law) != map.noise_dim()) throw ValidationError("jump law dimension does not match H* columns");

  StateMatrix states(nsteps + 1, K);
  std::vector<JumpEvent> events;
  Vector x = x0;
  Vector prev(K);
  Vector xi(model.noise_dim());
  EulerMaruyama em(model, dt);
  Rng noise = make_rng(seed, Stream::kDiffusion);
  Rng times = make_rng(seed, Stream::kJumpTimes);
  Rng sizes = make_rng(seed, Stream::kJumpSizes);
  states.row(0) = x.transpose();
  for (std::int64_t k = 0; k < nsteps; ++k) {
    prev = x;
    fill_standard_normal(noise, xi);
    em.step(x, xi);
    apply_interval_jumps(map, law, intensity, static_cast<double>(k) * dt, dt, prev, x, times, sizes, &events);
    if (!x.allFinite()) blow_up(k + 1);
    states.row(k + 1) = x.transpose();
  }
  return PerturbedRun{Trajectory(dt, std::move(states), TrajectoryOrigin{model.name() + "+jumps", seed, 0}),
                      std::move(events)};
}

}  // namespace jumpresp
