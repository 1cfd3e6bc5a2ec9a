#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumpresp/core_model.hpp"
#include "jumpresp/jump_integrals.hpp"

namespace jumpresp {

// Observable psi(x) whose average response is measured.
class TestFunction {
 public:
  enum class Kind { kIdentity, kComponent, kQuadratic, kEnergy };

  static TestFunction identity() { return TestFunction(Kind::kIdentity, 0, 0); }
  static TestFunction component(int i) { return TestFunction(Kind::kComponent, i, 0); }
  static TestFunction quadratic(int i, int j) { return TestFunction(Kind::kQuadratic, i, j); }
  static TestFunction energy() { return TestFunction(Kind::kEnergy, 0, 0); }

  Kind kind() const { return kind_; }
  // Number of outputs for a K-dimensional state.
  Eigen::Index outputs(Eigen::Index K) const { return kind_ == Kind::kIdentity ? K : 1; }
  void validate(Eigen::Index K) const;
  void eval(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  std::string describe() const;

 private:
  TestFunction(Kind kind, int i, int j) : kind_(kind), i_(i), j_(j) {}
  Kind kind_;
  int i_;
  int j_;
};

// Response values on a lag (or time) grid, one column per psi output.
struct ResponseCurve {
  std::vector<double> lags;
  Matrix values;  // lags x outputs
  Matrix std_error;  // lags x outputs, zero for analytic curves

  Eigen::Index outputs() const { return values.cols(); }
  void validate() const;
};

struct EstimatorOptions {
  // Batch length in samples for batch-means standard errors; 0 picks
  // 20 * T_corr / dt, capped so that at least 30 batches remain.
  std::int64_t batch_length = 0;
  // Decorrelation time used for the automatic batch length; estimated from
  // the trajectory when absent.
  std::optional<double> tcorr;
  // Abort when more than this fraction of samples has p0 below 1e-300.
  double max_skip_fraction = 1e-3;
  unsigned threads = 1;
};

// Per-sample estimator weight; NaN marks a sample skipped for density underflow.
struct WeightSeries {
  std::vector<double> weights;
  std::int64_t skipped = 0;
};

struct WeightSummary {
  double mean;
  double std_error;
  std::int64_t used;
};

// p0(xhat(x)) / p0(x) |Jac| - 1
WeightSeries deterministic_jump_weights(const Trajectory& traj, const Density& p0, const AffineJumpMap& map,
                                        double max_skip_fraction = 1e-3);
// J(x) / p0(x) - 1
WeightSeries random_jump_weights(const Trajectory& traj, const Density& p0, const JumpIntegral& J,
                                 double max_skip_fraction = 1e-3);
// J_g(x) / p0(x) - g(x)
WeightSeries response_operator_weights(const Trajectory& traj, const Density& p0, const JumpIntegral& Jg,
                                       const IntensityShape& gshape, double max_skip_fraction = 1e-3);

// Time average of the weights with a batch-means standard error.
WeightSummary summarize_weights(const WeightSeries& series, std::int64_t batch_length);

// Lag-indexed time correlation <psi(x(s + tau)) w(s)> with batch-means errors.
ResponseCurve correlate_weights(const Trajectory& traj, const WeightSeries& weights, const TestFunction& psi,
                                const std::vector<double>& lags, const EstimatorOptions& opts = {});

ResponseCurve det_jump_response(const Trajectory& traj, const Density& p0, const AffineJumpMap& map,
                                const TestFunction& psi, const std::vector<double>& lags,
                                const EstimatorOptions& opts = {});

ResponseCurve random_jump_response(const Trajectory& traj, const Density& p0, const JumpIntegral& J,
                                   const TestFunction& psi, const std::vector<double>& lags,
                                   const EstimatorOptions& opts = {});

ResponseCurve response_operator(const Trajectory& traj, const Density& p0, const JumpIntegral& Jg,
                                const IntensityShape& gshape, const TestFunction& psi,
                                const std::vector<double>& lags, const EstimatorOptions& opts = {});

// alpha * int_0^t R(t - s) eta(s) ds by the trapezoid rule on R's uniform lag
// grid. Every t must lie on that grid. Standard errors are propagated as fully
// correlated across lags.
ResponseCurve convolve_response(const ResponseCurve& R, const TimeProfile& eta, double alpha,
                                const std::vector<double>& tgrid);

struct AutocorrelationResult {
  std::vector<double> lags;
  std::vector<Matrix> acf;     // <x(t+s) x(s)^T>, mean-centered
  std::vector<Matrix> std_error;  // batch means over 50 batches
};

AutocorrelationResult autocorrelation(const Trajectory& traj, const std::vector<double>& lags);

struct TcorrResult {
  double tcorr;
  // Lag at which the ACF norm first fell below twice its standard error.
  double cutoff_lag;
  Matrix integrated;  // int_0^cutoff ACF dt
};

// Largest eigenvalue of (int_0^inf ACF dt) C^{-1}, integrating up to the
// first lag where the ACF drops below its noise floor.
TcorrResult estimate_tcorr_detail(const Trajectory& traj);
double estimate_tcorr(const Trajectory& traj);

enum class Verdict { kOk, kWarn };

struct AccuracyDiagnostic {
  double ratio;
  Verdict verdict;
};

// alpha * T_corr; ok strictly below 0.1.
AccuracyDiagnostic accuracy_diagnostic(double alpha, double tcorr);

std::string to_string(Verdict v);

// Lags in trajectory steps; throws ValidationError naming a lag that is off
// the dt grid or beyond the trajectory span.
std::vector<std::int64_t> lags_to_steps(const std::vector<double>& lags, double dt, std::int64_t nsamples);

}  // namespace jumpresp
