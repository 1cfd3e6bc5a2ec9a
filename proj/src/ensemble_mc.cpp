#include "jumpresp/ensemble_mc.hpp"

#include <cmath>
#include <functional>

#include "jumpresp/errors.hpp"
#include "jumpresp/parallel.hpp"

namespace jumpresp {

namespace {

constexpr std::int64_t kBlockSize = 64;

// Running mean and sum of squared deviations per (time, output).
struct Accumulator {
  double count = 0.0;
  Matrix mean;
  Matrix m2;

  Accumulator(Eigen::Index times, Eigen::Index outputs)
      : mean(Matrix::Zero(times, outputs)), m2(Matrix::Zero(times, outputs)) {}

  void add(Eigen::Index row, const Vector& value) {
    // Rows are filled in order for one member, so count is bumped by the caller.
    const Eigen::RowVectorXd delta = value.transpose() - mean.row(row);
    mean.row(row) += delta / count;
    m2.row(row) += (delta.array() * (value.transpose() - mean.row(row)).array()).matrix();
  }
};

Accumulator combine(const Accumulator& a, const Accumulator& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  Accumulator out(a.mean.rows(), a.mean.cols());
  out.count = a.count + b.count;
  const Matrix delta = b.mean - a.mean;
  out.mean = a.mean + delta * (b.count / out.count);
  out.m2 = a.m2 + b.m2 + (delta.array().square() * (a.count * b.count / out.count)).matrix();
  return out;
}

Accumulator tree_reduce(const std::vector<Accumulator>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return combine(tree_reduce(parts, lo, mid), tree_reduce(parts, mid, hi));
}

// Simulates every member with run(member, x0, acc); the callback adds the psi
// difference of each output row to the member's block accumulator.
using MemberRun = std::function<void(std::int64_t, const StateVector&, Accumulator&)>;

ResponseCurve run_ensemble(const ModelSpec& model, const TestFunction& psi, const EnsembleConfig& cfg,
                           const MemberRun& run) {
  cfg.validate();
  psi.validate(model.dim());
  const std::vector<StateVector> initial = ensemble_initial_states(model, cfg);
  const std::int64_t steps = cfg.steps();
  const std::int64_t rows = steps / cfg.output_stride + 1;
  const Eigen::Index J = psi.outputs(model.dim());
  const std::int64_t blocks = (cfg.members + kBlockSize - 1) / kBlockSize;
  std::vector<Accumulator> parts(static_cast<std::size_t>(blocks), Accumulator(rows, J));
  parallel_for(static_cast<std::size_t>(blocks), cfg.threads, [&](std::size_t b) {
    Accumulator& acc = parts[b];
    const std::int64_t first = static_cast<std::int64_t>(b) * kBlockSize;
    const std::int64_t last = std::min(cfg.members, first + kBlockSize);
    for (std::int64_t m = first; m < last; ++m) {
      acc.count += 1.0;
      run(m, initial[static_cast<std::size_t>(m)], acc);
    }
  });
  const Accumulator total = tree_reduce(parts, 0, parts.size());
  ResponseCurve curve;
  curve.lags.resize(static_cast<std::size_t>(rows));
  for (std::int64_t r = 0; r < rows; ++r) {
    curve.lags[static_cast<std::size_t>(r)] = static_cast<double>(r * cfg.output_stride) * cfg.dt;
  }
  curve.values = total.mean;
  curve.std_error = (total.m2.array() / ((total.count - 1.0) * total.count)).sqrt().matrix();
  return curve;
}

[[noreturn]] void member_blow_up(std::int64_t member, std::int64_t step) {
  throw NumericalError("numerical blow-up in ensemble member " + std::to_string(member) + " at step " +
                       std::to_string(step));
}

// Fixed-time jump at t = 0, then paired evolution.
ResponseCurve fixed_time_ensemble(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw* law,
                                  const TestFunction& psi, const EnsembleConfig& cfg) {
  if (map.dim() != model.dim()) throw ValidationError("jump map dimension does not match the model");
  if (law && law_dim(*law) != map.noise_dim()) throw ValidationError("jump law dimension does not match H* columns");
  const Eigen::Index K = model.dim();
  const Eigen::Index J = psi.outputs(K);
  const std::int64_t steps = cfg.steps();
  return run_ensemble(model, psi, cfg, [&](std::int64_t m, const StateVector& x0, Accumulator& acc) {
    Vector z = Vector::Zero(map.noise_dim());
    if (law) {
      Rng sizes = make_rng(cfg.seed, Stream::kJumpSizes, static_cast<std::uint64_t>(m));
      z = sample_law(*law, sizes);
    }
    Vector xu = x0;
    Vector xp = apply_jump(map, x0, z);
    Rng noise = make_rng(cfg.seed, Stream::kDiffusion, static_cast<std::uint64_t>(m));
    Rng other = make_rng(cfg.seed, Stream::kAuxiliary, static_cast<std::uint64_t>(m));
    EulerMaruyama emu(model, cfg.dt);
    EulerMaruyama emp(model, cfg.dt);
    Vector xi(model.noise_dim());
    Vector xi2(model.noise_dim());
    Vector pu(J), pp(J);
    auto record = [&](Eigen::Index row) {
      psi.eval(xu, pu);
      psi.eval(xp, pp);
      acc.add(row, pp - pu);
    };
    record(0);
    for (std::int64_t k = 1; k <= steps; ++k) {
      fill_standard_normal(noise, xi);
      emu.step(xu, xi);
      if (cfg.common_noise) {
        emp.step(xp, xi);
      } else {
        fill_standard_normal(other, xi2);
        emp.step(xp, xi2);
      }
      if (!xu.allFinite() || !xp.allFinite()) member_blow_up(m, k);
      if (k % cfg.output_stride == 0) record(k / cfg.output_stride);
    }
  });
}

}  // namespace

void EnsembleConfig::validate() const {
  if (members < 2) throw ValidationError("ensemble needs at least 2 members");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ValidationError("ensemble dt and horizon must be positive");
  const double ratio = horizon / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) throw ValidationError("ensemble horizon must be a multiple of dt");
  if (output_stride < 1) throw ValidationError("output stride must be >= 1");
  if (steps() % output_stride != 0) throw ValidationError("horizon steps must be a multiple of the output stride");
  if (burn_in < 0 || thin < 0) throw ValidationError("burn-in and thinning must be >= 0");
}

std::int64_t EnsembleConfig::steps() const { return static_cast<std::int64_t>(std::llround(horizon / dt)); }

std::vector<StateVector> ensemble_initial_states(const ModelSpec& model, const EnsembleConfig& cfg) {
  StationarySampling sampling;
  sampling.dt = cfg.dt;
  sampling.burn_in = cfg.burn_in;
  sampling.thin = cfg.thin;
  if (!model.is_ou() && (cfg.burn_in == 0 || cfg.thin == 0)) {
    Vector x0 = Vector::Zero(model.dim());
    x0[0] = 0.01;
    const Trajectory pilot = simulate_unperturbed(model, x0, cfg.dt, cfg.pilot_steps,
                                                  derive_seed(cfg.seed, Stream::kAuxiliary, 0xffff));
    const double tcorr = estimate_tcorr(pilot.tail(cfg.pilot_steps / 10));
    if (cfg.burn_in == 0) sampling.burn_in = static_cast<std::int64_t>(std::ceil(100.0 * tcorr / cfg.dt));
    if (cfg.thin == 0) sampling.thin = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(10.0 * tcorr / cfg.dt)));
  }
  return sample_stationary(model, cfg.members, cfg.seed, sampling);
}

ResponseCurve mc_det_jump_response(const ModelSpec& model, const AffineJumpMap& map, const TestFunction& psi,
                                   const EnsembleConfig& cfg) {
  if (map.z_coupled()) throw ValidationError("deterministic jump ensemble needs a z-free jump map");
  return fixed_time_ensemble(model, map, nullptr, psi, cfg);
}

ResponseCurve mc_random_jump_response(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw& law,
                                      const TestFunction& psi, const EnsembleConfig& cfg) {
  return fixed_time_ensemble(model, map, &law, psi, cfg);
}

ResponseCurve mc_random_time_response(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw& law,
                                      const IntensityModel& intensity, const TestFunction& psi,
                                      const EnsembleConfig& cfg) {
  if (map.dim() != model.dim()) throw ValidationError("jump map dimension does not match the model");
  if (law_dim(law) != map.noise_dim()) throw ValidationError("jump law dimension does not match H* columns");
  const Eigen::Index K = model.dim();
  const Eigen::Index J = psi.outputs(K);
  const std::int64_t steps = cfg.steps();
  return run_ensemble(model, psi, cfg, [&](std::int64_t m, const StateVector& x0, Accumulator& acc) {
    const auto member = static_cast<std::uint64_t>(m);
    Rng noise = make_rng(cfg.seed, Stream::kDiffusion, member);
    Rng times = make_rng(cfg.seed, Stream::kJumpTimes, member);
    Rng sizes = make_rng(cfg.seed, Stream::kJumpSizes, member);
    Vector xu = x0;
    Vector xp = x0;
    Vector prev(K);
    EulerMaruyama emu(model, cfg.dt);
    EulerMaruyama emp(model, cfg.dt);
    Vector xi(model.noise_dim());
    Vector pu(J), pp(J);
    auto record = [&](Eigen::Index row) {
      psi.eval(xu, pu);
      psi.eval(xp, pp);
      acc.add(row, pp - pu);
    };
    record(0);
    for (std::int64_t k = 1; k <= steps; ++k) {
      fill_standard_normal(noise, xi);
      emu.step(xu, xi);
      prev = xp;
      emp.step(xp, xi);
      apply_interval_jumps(map, law, intensity, static_cast<double>(k - 1) * cfg.dt, cfg.dt, prev, xp, times, sizes,
                           nullptr);
      if (!xu.allFinite() || !xp.allFinite()) member_blow_up(m, k);
      if (k % cfg.output_stride == 0) record(k / cfg.output_stride);
    }
  });
}

}  // namespace jumpresp
