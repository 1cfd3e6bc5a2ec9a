#include "jumpresp/response_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jumpresp/errors.hpp"
#include "jumpresp/parallel.hpp"

namespace jumpresp {

namespace {

// log(1e-300)
constexpr double kLogDensityFloor = -690.77552789821368;
constexpr std::int64_t kMinBatches = 30;
constexpr std::int64_t kAcfBatches = 50;

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

template <class WeightFn>
WeightSeries build_weights(const Trajectory& traj, const Density& p0, double max_skip_fraction, WeightFn&& fn) {
  if (density_dim(p0) != traj.dim()) throw ValidationError("p0 dimension does not match the trajectory");
  WeightSeries series;
  series.weights.resize(static_cast<std::size_t>(traj.size()));
  for (Eigen::Index s = 0; s < traj.size(); ++s) {
    const auto x = traj.state(s);
    const double logp = log_density(p0, x);
    if (!(logp >= kLogDensityFloor)) {
      series.weights[static_cast<std::size_t>(s)] = std::numeric_limits<double>::quiet_NaN();
      ++series.skipped;
      continue;
    }
    series.weights[static_cast<std::size_t>(s)] = fn(x, logp);
  }
  const double fraction = static_cast<double>(series.skipped) / static_cast<double>(traj.size());
  if (fraction > max_skip_fraction) {
    throw NumericalError("p0 underflows (< 1e-300) on " + std::to_string(series.skipped) + " of " +
                         std::to_string(traj.size()) + " samples; the density does not cover the trajectory");
  }
  return series;
}

std::int64_t resolve_batch_length(const Trajectory& traj, const EstimatorOptions& opts, std::int64_t min_pairs) {
  const std::int64_t cap = std::max<std::int64_t>(1, min_pairs / kMinBatches);
  if (opts.batch_length > 0) return std::min(opts.batch_length, cap);
  double tcorr = 0.0;
  if (opts.tcorr) {
    tcorr = *opts.tcorr;
  } else {
    try {
      tcorr = estimate_tcorr(traj);
    } catch (const NumericalError&) {
      return cap;
    }
  }
  const auto wanted = static_cast<std::int64_t>(std::ceil(20.0 * tcorr / traj.dt()));
  return std::clamp<std::int64_t>(wanted, 1, cap);
}

double mean_se(const std::vector<double>& batch_means) {
  const auto nb = static_cast<double>(batch_means.size());
  if (batch_means.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : batch_means) mean += v;
  mean /= nb;
  double ss = 0.0;
  for (double v : batch_means) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (nb - 1.0) / nb);
}

}  // namespace

// --- TestFunction ----------------------------------------------------------------

void TestFunction::validate(Eigen::Index K) const {
  auto in_range = [K](int i) { return i >= 0 && i < K; };
  if (kind_ == Kind::kComponent && !in_range(i_)) throw ValidationError("test function component index out of range");
  if (kind_ == Kind::kQuadratic && (!in_range(i_) || !in_range(j_))) {
    throw ValidationError("test function quadratic index out of range");
  }
}

void TestFunction::eval(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  switch (kind_) {
    case Kind::kIdentity:
      out = x;
      break;
    case Kind::kComponent:
      out[0] = x[i_];
      break;
    case Kind::kQuadratic:
      out[0] = x[i_] * x[j_];
      break;
    case Kind::kEnergy:
      out[0] = 0.5 * x.squaredNorm();
      break;
  }
}

std::string TestFunction::describe() const {
  switch (kind_) {
    case Kind::kIdentity:
      return "identity";
    case Kind::kComponent:
      return "x" + std::to_string(i_);
    case Kind::kQuadratic:
      return "x" + std::to_string(i_) + "*x" + std::to_string(j_);
    case Kind::kEnergy:
      return "energy";
  }
  return "?";
}

void ResponseCurve::validate() const {
  const auto n = static_cast<Eigen::Index>(lags.size());
  if (values.rows() != n || std_error.rows() != n || values.cols() != std_error.cols()) {
    throw ValidationError("response curve: lags, values and standard errors disagree in shape");
  }
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!std::isfinite(lags[i]) || lags[i] < 0.0) throw ValidationError("response curve: lags must be nonnegative");
    if (i > 0 && !(lags[i] > lags[i - 1])) throw ValidationError("response curve: lags must be strictly increasing");
  }
  if (!values.allFinite()) throw ValidationError("response curve: values must be finite");
}

std::vector<std::int64_t> lags_to_steps(const std::vector<double>& lags, double dt, std::int64_t nsamples) {
  std::vector<std::int64_t> steps;
  steps.reserve(lags.size());
  for (double lag : lags) {
    if (!std::isfinite(lag) || lag < 0.0) throw ValidationError("lag " + fmt_num(lag) + " is not a nonnegative number");
    const double ratio = lag / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6) {
      throw ValidationError("lag " + fmt_num(lag) + " is not a multiple of the trajectory step " + fmt_num(dt));
    }
    const auto step = static_cast<std::int64_t>(rounded);
    if (step >= nsamples - 1) {
      throw ValidationError("lag " + fmt_num(lag) + " exceeds the trajectory span " +
                            fmt_num(dt * static_cast<double>(nsamples - 1)));
    }
    steps.push_back(step);
  }
  return steps;
}

// --- Weights -----------------------------------------------------------------------

WeightSeries deterministic_jump_weights(const Trajectory& traj, const Density& p0, const AffineJumpMap& map,
                                        double max_skip_fraction) {
  if (map.dim() != traj.dim()) throw ValidationError("jump map dimension does not match the trajectory");
  if (map.z_coupled()) throw ValidationError("deterministic jump response needs a z-free jump map");
  const Vector zero = Vector::Zero(map.noise_dim());
  const double log_jac = -std::log(map.abs_det());
  return build_weights(traj, p0, max_skip_fraction, [&](const auto& x, double logp) {
    const InverseJump inv = invert_jump(map, x, zero);
    return std::exp(log_density(p0, inv.xhat) + log_jac - logp) - 1.0;
  });
}

WeightSeries random_jump_weights(const Trajectory& traj, const Density& p0, const JumpIntegral& J,
                                 double max_skip_fraction) {
  if (J.dim() != traj.dim()) throw ValidationError("jump integral dimension does not match the trajectory");
  return build_weights(traj, p0, max_skip_fraction,
                       [&](const auto& x, double logp) { return std::exp(J.log_value(x) - logp) - 1.0; });
}

WeightSeries response_operator_weights(const Trajectory& traj, const Density& p0, const JumpIntegral& Jg,
                                       const IntensityShape& gshape, double max_skip_fraction) {
  if (Jg.dim() != traj.dim()) throw ValidationError("jump integral dimension does not match the trajectory");
  return build_weights(traj, p0, max_skip_fraction,
                       [&](const auto& x, double logp) { return std::exp(Jg.log_value(x) - logp) - gshape(x); });
}

WeightSummary summarize_weights(const WeightSeries& series, std::int64_t batch_length) {
  const auto n = static_cast<std::int64_t>(series.weights.size());
  const std::int64_t B = std::clamp<std::int64_t>(batch_length, 1, std::max<std::int64_t>(1, n / kMinBatches));
  const std::int64_t nb = n / B;
  double total = 0.0;
  std::int64_t used = 0;
  std::vector<double> batch_means;
  batch_means.reserve(static_cast<std::size_t>(nb));
  for (std::int64_t b = 0; b < nb; ++b) {
    double acc = 0.0;
    std::int64_t cnt = 0;
    for (std::int64_t s = b * B; s < (b + 1) * B; ++s) {
      const double w = series.weights[static_cast<std::size_t>(s)];
      if (std::isnan(w)) continue;
      acc += w;
      ++cnt;
    }
    total += acc;
    used += cnt;
    if (cnt > 0) batch_means.push_back(acc / static_cast<double>(cnt));
  }
  for (std::int64_t s = nb * B; s < n; ++s) {
    const double w = series.weights[static_cast<std::size_t>(s)];
    if (std::isnan(w)) continue;
    total += w;
    ++used;
  }
  return WeightSummary{used > 0 ? total / static_cast<double>(used) : 0.0, mean_se(batch_means), used};
}

// --- Correlation ---------------------------------------------------------------

ResponseCurve correlate_weights(const Trajectory& traj, const WeightSeries& weights, const TestFunction& psi,
                                const std::vector<double>& lags, const EstimatorOptions& opts) {
  const Eigen::Index K = traj.dim();
  const std::int64_t N = traj.size();
  psi.validate(K);
  if (static_cast<std::int64_t>(weights.weights.size()) != N) {
    throw ValidationError("weight series length does not match the trajectory");
  }
  if (lags.empty()) throw ValidationError("no lags requested");
  const std::vector<std::int64_t> steps = lags_to_steps(lags, traj.dt(), N);
  const std::int64_t max_step = *std::max_element(steps.begin(), steps.end());
  const std::int64_t B = resolve_batch_length(traj, opts, N - max_step);

  const Eigen::Index J = psi.outputs(K);
  StateMatrix psi_series(N, J);
  {
    Vector out(J);
    for (std::int64_t s = 0; s < N; ++s) {
      psi.eval(traj.state(s), out);
      psi_series.row(s) = out.transpose();
    }
  }
  const std::vector<double>& w = weights.weights;

  ResponseCurve curve;
  curve.lags = lags;
  curve.values.resize(static_cast<Eigen::Index>(lags.size()), J);
  curve.std_error.resize(static_cast<Eigen::Index>(lags.size()), J);

  parallel_for(lags.size(), opts.threads, [&](std::size_t li) {
    const std::int64_t lag = steps[li];
    const std::int64_t pairs = N - lag;
    const std::int64_t nb = pairs / B;
    Vector total = Vector::Zero(J);
    std::int64_t used = 0;
    std::vector<std::vector<double>> batch_means(static_cast<std::size_t>(J));
    for (auto& bm : batch_means) bm.reserve(static_cast<std::size_t>(nb));
    Vector acc(J);
    for (std::int64_t b = 0; b <= nb; ++b) {
      const std::int64_t begin = b * B;
      const std::int64_t end = std::min(pairs, begin + B);
      if (begin >= end) break;
      acc.setZero();
      std::int64_t cnt = 0;
      for (std::int64_t s = begin; s < end; ++s) {
        const double ws = w[static_cast<std::size_t>(s)];
        if (std::isnan(ws)) continue;
        acc.noalias() += ws * psi_series.row(s + lag).transpose();
        ++cnt;
      }
      total += acc;
      used += cnt;
      if (b < nb && cnt > 0) {
        for (Eigen::Index j = 0; j < J; ++j) batch_means[static_cast<std::size_t>(j)].push_back(acc[j] / static_cast<double>(cnt));
      }
    }
    const auto row = static_cast<Eigen::Index>(li);
    for (Eigen::Index j = 0; j < J; ++j) {
      curve.values(row, j) = used > 0 ? total[j] / static_cast<double>(used) : 0.0;
      curve.std_error(row, j) = mean_se(batch_means[static_cast<std::size_t>(j)]);
    }
  });
  return curve;
}

ResponseCurve det_jump_response(const Trajectory& traj, const Density& p0, const AffineJumpMap& map,
                                const TestFunction& psi, const std::vector<double>& lags,
                                const EstimatorOptions& opts) {
  lags_to_steps(lags, traj.dt(), traj.size());
  const WeightSeries w = deterministic_jump_weights(traj, p0, map, opts.max_skip_fraction);
  return correlate_weights(traj, w, psi, lags, opts);
}

ResponseCurve random_jump_response(const Trajectory& traj, const Density& p0, const JumpIntegral& J,
                                   const TestFunction& psi, const std::vector<double>& lags,
                                   const EstimatorOptions& opts) {
  lags_to_steps(lags, traj.dt(), traj.size());
  const WeightSeries w = random_jump_weights(traj, p0, J, opts.max_skip_fraction);
  return correlate_weights(traj, w, psi, lags, opts);
}

ResponseCurve response_operator(const Trajectory& traj, const Density& p0, const JumpIntegral& Jg,
                                const IntensityShape& gshape, const TestFunction& psi,
                                const std::vector<double>& lags, const EstimatorOptions& opts) {
  lags_to_steps(lags, traj.dt(), traj.size());
  const WeightSeries w = response_operator_weights(traj, p0, Jg, gshape, opts.max_skip_fraction);
  return correlate_weights(traj, w, psi, lags, opts);
}

// --- Convolution -------------------------------------------------------------------

ResponseCurve convolve_response(const ResponseCurve& R, const TimeProfile& eta, double alpha,
                                const std::vector<double>& tgrid) {
  R.validate();
  if (R.lags.size() < 2) throw ValidationError("convolution needs a response curve with at least two lags");
  if (std::abs(R.lags.front()) > 0.0) throw ValidationError("convolution needs a response curve starting at lag 0");
  const double step = R.lags[1] - R.lags[0];
  for (std::size_t k = 0; k < R.lags.size(); ++k) {
    if (std::abs(R.lags[k] - static_cast<double>(k) * step) > 1e-9 * std::max(1.0, R.lags[k])) {
      throw ValidationError("convolution needs a uniform lag grid");
    }
  }
  const Eigen::Index J = R.outputs();
  ResponseCurve out;
  out.lags = tgrid;
  out.values = Matrix::Zero(static_cast<Eigen::Index>(tgrid.size()), J);
  out.std_error = Matrix::Zero(static_cast<Eigen::Index>(tgrid.size()), J);
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    const double t = tgrid[i];
    const double ratio = t / step;
    const double n_real = std::round(ratio);
    if (t < 0.0 || std::abs(ratio - n_real) > 1e-6) {
      throw ValidationError("time " + fmt_num(t) + " is not on the response lag grid (step " + fmt_num(step) + ")");
    }
    const auto n = static_cast<std::size_t>(n_real);
    if (n >= R.lags.size()) {
      throw ValidationError("time " + fmt_num(t) + " exceeds the response lag span " + fmt_num(R.lags.back()));
    }
    if (n == 0) continue;
    for (std::size_t k = 0; k <= n; ++k) {
      const double wt = (k == 0 || k == n) ? 0.5 : 1.0;
      const double factor = alpha * step * wt * eta(t - R.lags[k]);
      out.values.row(static_cast<Eigen::Index>(i)) += factor * R.values.row(static_cast<Eigen::Index>(k));
      out.std_error.row(static_cast<Eigen::Index>(i)) += std::abs(factor) * R.std_error.row(static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

// --- Autocorrelation -------------------------------------------------------------

namespace {

struct AcfPoint {
  Matrix value;
  Matrix std_error;
};

AcfPoint acf_at(const StateMatrix& centered, std::int64_t lag) {
  const std::int64_t N = centered.rows();
  const Eigen::Index K = centered.cols();
  const std::int64_t pairs = N - lag;
  const std::int64_t nb = std::min<std::int64_t>(kAcfBatches, pairs);
  const std::int64_t B = pairs / nb;
  Matrix total = Matrix::Zero(K, K);
  Matrix batch = Matrix::Zero(K, K);
  std::vector<Matrix> batch_means;
  batch_means.reserve(static_cast<std::size_t>(nb));
  for (std::int64_t b = 0; b < nb; ++b) {
    batch.setZero();
    const std::int64_t end = (b == nb - 1) ? pairs : (b + 1) * B;
    for (std::int64_t s = b * B; s < end; ++s) {
      batch.noalias() += centered.row(s + lag).transpose() * centered.row(s);
    }
    total += batch;
    batch_means.push_back(batch / static_cast<double>(end - b * B));
  }
  AcfPoint p;
  p.value = total / static_cast<double>(pairs);
  Matrix ss = Matrix::Zero(K, K);
  for (const auto& m : batch_means) ss.array() += (m - p.value).array().square();
  const auto nbd = static_cast<double>(nb);
  p.std_error = (ss.array() / ((nbd - 1.0) * nbd)).sqrt().matrix();
  return p;
}

StateMatrix centered_states(const Trajectory& traj) {
  const Vector mean = traj.states().colwise().mean().transpose();
  return traj.states().rowwise() - mean.transpose();
}

}  // namespace

AutocorrelationResult autocorrelation(const Trajectory& traj, const std::vector<double>& lags) {
  const std::vector<std::int64_t> steps = lags_to_steps(lags, traj.dt(), traj.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (traj.size() - steps[i] < 2 * kAcfBatches) {
      throw ValidationError("insufficient samples for lag " + fmt_num(lags[i]));
    }
  }
  const StateMatrix centered = centered_states(traj);
  AutocorrelationResult out;
  out.lags = lags;
  for (std::int64_t lag : steps) {
    AcfPoint p = acf_at(centered, lag);
    out.acf.push_back(std::move(p.value));
    out.std_error.push_back(std::move(p.std_error));
  }
  return out;
}

TcorrResult estimate_tcorr_detail(const Trajectory& traj) {
  const std::int64_t N = traj.size();
  const std::int64_t max_lag = N / 4;
  if (N < 4 * kAcfBatches) throw NumericalError("trajectory too short to estimate the decorrelation time");
  const StateMatrix centered = centered_states(traj);
  const double dt = traj.dt();

  AcfPoint prev = acf_at(centered, 0);
  const Matrix C = prev.value;
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success) throw NumericalError("lag-0 covariance is not positive definite");
  Matrix integral = Matrix::Zero(C.rows(), C.cols());
  std::int64_t lag = 0;
  while (true) {
    const std::int64_t next = lag + std::max<std::int64_t>(1, lag / 20);
    if (next > max_lag) {
      throw NumericalError("autocorrelation does not decay within the trajectory window; use a longer trajectory");
    }
    AcfPoint cur = acf_at(centered, next);
    integral += 0.5 * static_cast<double>(next - lag) * dt * (prev.value + cur.value);
    lag = next;
    if (cur.value.norm() < 2.0 * cur.std_error.norm()) break;
    prev = std::move(cur);
  }
  const Matrix T = integral * llt.solve(Matrix::Identity(C.rows(), C.cols()));
  Eigen::EigenSolver<Matrix> eig(T, false);
  TcorrResult result;
  result.tcorr = eig.eigenvalues().real().maxCoeff();
  result.cutoff_lag = static_cast<double>(lag) * dt;
  result.integrated = integral;
  return result;
}

double estimate_tcorr(const Trajectory& traj) { return estimate_tcorr_detail(traj).tcorr; }

AccuracyDiagnostic accuracy_diagnostic(double alpha, double tcorr) {
  if (!(alpha > 0.0) || !(tcorr > 0.0)) throw ValidationError("accuracy diagnostic needs positive alpha and T_corr");
  const double ratio = alpha * tcorr;
  return AccuracyDiagnostic{ratio, ratio < 0.1 ? Verdict::kOk : Verdict::kWarn};
}

std::string to_string(Verdict v) { return v == Verdict::kOk ? "ok" : "warn"; }

}  // namespace jumpresp
