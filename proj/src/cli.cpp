#include "jumpresp/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "jumpresp/analytic_oracle.hpp"
#include "jumpresp/config.hpp"
#include "jumpresp/ensemble_mc.hpp"
#include "jumpresp/errors.hpp"
#include "jumpresp/io.hpp"
#include "jumpresp/jump_integrals.hpp"
#include "jumpresp/response_estimators.hpp"
#include "jumpresp/sde_engine.hpp"

namespace jumpresp {

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
};

// Writes to --out when given, to the result stream otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) throw ValidationError("cannot open '" + path + "' for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  void finish(const std::string& path) {
    os_->flush();
    if (!*os_) throw ValidationError("failed writing '" + (path.empty() ? std::string("<stdout>") : path) + "'");
  }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

ExperimentConfig load(const CommonFlags& flags) {
  if (flags.config.empty()) throw ValidationError("--config is required for this subcommand");
  ExperimentConfig cfg = load_config(flags.config);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.ensemble.seed = *flags.seed;
  }
  if (flags.threads) {
    if (*flags.threads < 1) throw ValidationError("--threads must be at least 1");
    cfg.threads = *flags.threads;
    cfg.ensemble.threads = *flags.threads;
    cfg.estimator.threads = *flags.threads;
  }
  return cfg;
}

std::string output_path(const CommonFlags& flags, const ExperimentConfig& cfg) {
  if (!flags.out.empty()) return flags.out;
  return cfg.output.value_or("");
}

const ModelSpec& require_model(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ValidationError("config: 'model' is required");
  return *cfg.model;
}

const AffineJumpMap& require_jump(const ExperimentConfig& cfg) {
  if (!cfg.jump) throw ValidationError("config: 'jump' is required");
  return *cfg.jump;
}

const IntensityModel& require_intensity(const ExperimentConfig& cfg) {
  if (!cfg.intensity) throw ValidationError("config: 'intensity' is required for the random_time scenario");
  return *cfg.intensity;
}

const std::vector<double>& require_lags(const ExperimentConfig& cfg) {
  if (cfg.lags.empty()) throw ValidationError("config: 'lags' is required");
  return cfg.lags;
}

// The configured law, or a point mass in zero dimensions for a z-free map.
JumpLaw effective_law(const ExperimentConfig& cfg) {
  const AffineJumpMap& map = require_jump(cfg);
  if (cfg.law) return *cfg.law;
  if (map.noise_dim() > 0) throw ValidationError("config: 'jump_law' is required when jump.Hstar is given");
  return DiscreteLaw({Vector(0)}, {1.0});
}

Trajectory obtain_trajectory(const ExperimentConfig& cfg) {
  const auto& t = cfg.trajectory;
  if (t.input) {
    Trajectory traj = read_trajectory(*t.input);
    if (cfg.model && traj.dim() != cfg.model->dim()) {
      throw ValidationError("trajectory '" + *t.input + "' has K=" + std::to_string(traj.dim()) + ", model has K=" +
                            std::to_string(cfg.model->dim()));
    }
    return t.burn_in > 0 ? traj.tail(t.burn_in) : traj;
  }
  const ModelSpec& model = require_model(cfg);
  const Vector x0 = t.x0.size() ? t.x0 : Vector::Zero(model.dim());
  const std::int64_t total = t.steps + t.burn_in;
  Trajectory traj = (model.is_ou() && t.exact_ou)
                        ? simulate_ou_exact(model.ou_params().L, model.ou_params().G, x0, t.dt, total, cfg.seed)
                        : simulate_unperturbed(model, x0, t.dt, total, cfg.seed);
  return t.burn_in > 0 ? traj.tail(t.burn_in) : traj;
}

Density build_p0(const ExperimentConfig& cfg, const Trajectory& traj) {
  switch (cfg.p0.kind) {
    case P0Settings::Kind::kExact: {
      const ModelSpec& model = require_model(cfg);
      if (!model.is_ou()) throw ValidationError("p0 'exact' is only available for OU models");
      return OUParams(model.ou_params().L, model.ou_params().G).stationary_density();
    }
    case P0Settings::Kind::kQuasiGaussian:
      return fit_quasi_gaussian(traj);
    case P0Settings::Kind::kMixtureFit:
      return fit_gaussian_mixture(traj, cfg.p0.components);
    case P0Settings::Kind::kExplicit:
      return *cfg.p0.density;
  }
  throw ValidationError("unknown p0 kind");
}

void report_diagnostic(std::ostream& log, double alpha, double tcorr) {
  const AccuracyDiagnostic d = accuracy_diagnostic(alpha, tcorr);
  log << "T_corr=" << format_double(tcorr) << " alpha*T_corr=" << format_double(d.ratio)
      << " verdict=" << to_string(d.verdict) << "\n";
}

int cmd_simulate(const CommonFlags& flags, std::ostream& out, std::ostream& log) {
  ExperimentConfig cfg = load(flags);
  cfg.trajectory.input.reset();
  const Trajectory traj = obtain_trajectory(cfg);
  const std::string path = output_path(flags, cfg);
  if (path.empty()) {
    out << "# dt=" << format_double(traj.dt()) << "\n# K=" << traj.dim() << "\n";
    for (Eigen::Index s = 0; s < traj.size(); ++s) {
      for (Eigen::Index k = 0; k < traj.dim(); ++k) out << (k ? "," : "") << format_double(traj.states()(s, k));
      out << "\n";
    }
  } else {
    write_trajectory(path, traj);
  }
  log << "simulated " << traj.size() << " samples of " << require_model(cfg).name() << "\n";
  return kExitOk;
}

int cmd_estimate(const CommonFlags& flags, std::ostream& out, std::ostream& log) {
  const ExperimentConfig cfg = load(flags);
  const AffineJumpMap& map = require_jump(cfg);
  const auto& lags = require_lags(cfg);
  const Trajectory traj = obtain_trajectory(cfg);
  // Off-grid or out-of-span lags fail before any density work.
  lags_to_steps(lags, traj.dt(), traj.size());
  const Density p0 = build_p0(cfg, traj);

  ResponseCurve curve;
  switch (cfg.scenario) {
    case Scenario::kDeterministic:
      curve = det_jump_response(traj, p0, map, cfg.psi, lags, cfg.estimator);
      break;
    case Scenario::kRandom: {
      const JumpIntegral J(JumpIntegralSpec{p0, map, effective_law(cfg), std::nullopt});
      curve = random_jump_response(traj, p0, J, cfg.psi, lags, cfg.estimator);
      break;
    }
    case Scenario::kRandomTime: {
      const IntensityModel& intensity = require_intensity(cfg);
      const JumpIntegral Jg(JumpIntegralSpec{p0, map, effective_law(cfg), intensity.gshape()});
      curve = response_operator(traj, p0, Jg, intensity.gshape(), cfg.psi, lags, cfg.estimator);
      if (cfg.convolve) curve = convolve_response(curve, intensity.eta(), intensity.alpha(), lags);
      const double tcorr = cfg.estimator.tcorr ? *cfg.estimator.tcorr : estimate_tcorr(traj);
      report_diagnostic(log, intensity.alpha() * intensity.eta().supremum() * intensity.gshape().supremum(), tcorr);
      break;
    }
  }
  const std::string path = output_path(flags, cfg);
  Sink sink(path, out);
  write_curve(sink.stream(), curve);
  sink.finish(path);
  return kExitOk;
}

int cmd_oracle(const CommonFlags& flags, std::ostream& out, std::ostream& log) {
  const ExperimentConfig cfg = load(flags);
  const ModelSpec& model = require_model(cfg);
  if (!model.is_ou()) throw ValidationError("oracle curves are only available for OU models");
  if (cfg.psi.kind() != TestFunction::Kind::kIdentity) {
    throw ValidationError("oracle curves are mean responses; psi must be identity");
  }
  const OUParams ou(model.ou_params().L, model.ou_params().G);
  const AffineJumpMap& map = require_jump(cfg);
  const auto& tgrid = require_lags(cfg);

  ResponseCurve curve;
  if (cfg.oracle.curve == OracleSettings::Curve::kResponse) {
    switch (cfg.scenario) {
      case Scenario::kDeterministic:
        curve = ou_mean_response_det(ou, map, tgrid);
        break;
      case Scenario::kRandom:
        curve = ou_mean_response_random(ou, map, effective_law(cfg), tgrid);
        break;
      case Scenario::kRandomTime:
        curve = ou_response_operator(ou, map, effective_law(cfg), require_intensity(cfg).gshape(), tgrid);
        break;
    }
  } else {
    const IntensityModel& intensity = require_intensity(cfg);
    if (!intensity.eta().is_constant() || !intensity.gshape().is_constant()) {
      throw ValidationError("exact_mean and leading_order curves need a constant eta and g");
    }
    const double alpha = intensity.alpha() * intensity.eta()(0.0);
    const Vector zbar = law_mean(effective_law(cfg));
    if (cfg.oracle.curve == OracleSettings::Curve::kExactMean) {
      PerturbedMean pm = ou_exact_perturbed_mean(ou, map, zbar, alpha, tgrid);
      if (pm.unbounded) log << "warning: L - alpha H is not stable; the exact mean response grows without bound\n";
      curve = std::move(pm.curve);
    } else {
      curve = ou_leading_order_mean(ou, map, zbar, alpha, tgrid);
    }
  }
  const std::string path = output_path(flags, cfg);
  Sink sink(path, out);
  write_curve(sink.stream(), curve);
  sink.finish(path);
  return kExitOk;
}

int cmd_mc(const CommonFlags& flags, std::ostream& out, std::ostream& log) {
  const ExperimentConfig cfg = load(flags);
  const ModelSpec& model = require_model(cfg);
  const AffineJumpMap& map = require_jump(cfg);
  ResponseCurve curve;
  switch (cfg.scenario) {
    case Scenario::kDeterministic:
      curve = mc_det_jump_response(model, map, cfg.psi, cfg.ensemble);
      break;
    case Scenario::kRandom:
      curve = mc_random_jump_response(model, map, effective_law(cfg), cfg.psi, cfg.ensemble);
      break;
    case Scenario::kRandomTime:
      curve = mc_random_time_response(model, map, effective_law(cfg), require_intensity(cfg), cfg.psi, cfg.ensemble);
      break;
  }
  log << "ensemble of " << cfg.ensemble.members << " members, " << to_string(cfg.scenario) << " scenario\n";
  const std::string path = output_path(flags, cfg);
  Sink sink(path, out);
  write_curve(sink.stream(), curve);
  sink.finish(path);
  return kExitOk;
}

int cmd_compare(const CommonFlags& flags, const std::vector<std::string>& files, std::ostream& out,
                std::ostream& log) {
  const ResponseCurve a = read_curve(files.at(0));
  const ResponseCurve b = read_curve(files.at(1));
  bool same_grid = a.lags.size() == b.lags.size();
  for (std::size_t i = 0; same_grid && i < a.lags.size(); ++i) {
    same_grid = std::abs(a.lags[i] - b.lags[i]) <= 1e-9 * std::max(1.0, std::abs(a.lags[i]));
  }
  if (!same_grid) throw ValidationError("compare: the two curves have different lag grids");
  if (a.outputs() != b.outputs()) throw ValidationError("compare: the two curves have different output counts");
  const Eigen::Index J = a.outputs();
  const std::string path = flags.out;
  Sink sink(path, out);
  std::ostream& os = sink.stream();
  os << "lag";
  for (Eigen::Index j = 1; j <= J; ++j) os << ",diff_" << j;
  for (Eigen::Index j = 1; j <= J; ++j) os << ",z_" << j;
  os << "\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < a.lags.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    os << format_double(a.lags[i]);
    std::vector<double> z(static_cast<std::size_t>(J));
    for (Eigen::Index j = 0; j < J; ++j) {
      const double diff = a.values(r, j) - b.values(r, j);
      const double se = std::hypot(a.std_error(r, j), b.std_error(r, j));
      z[static_cast<std::size_t>(j)] = diff == 0.0 ? 0.0 : diff / se;
      worst = std::max(worst, std::abs(z[static_cast<std::size_t>(j)]));
      os << ',' << format_double(diff);
    }
    for (double v : z) os << ',' << format_double(v);
    os << "\n";
  }
  sink.finish(path);
  log << "max |difference| in SE units: " << format_double(worst) << "\n";
  return kExitOk;
}

int cmd_acf(const CommonFlags& flags, std::ostream& out, std::ostream& log) {
  const ExperimentConfig cfg = load(flags);
  const Trajectory traj = obtain_trajectory(cfg);
  const TcorrResult tc = estimate_tcorr_detail(traj);
  std::vector<double> lags = cfg.lags;
  if (lags.empty()) {
    const auto steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(tc.cutoff_lag / traj.dt())));
    const std::int64_t stride = std::max<std::int64_t>(1, steps / 50);
    for (std::int64_t s = 0; s <= steps && s < traj.size(); s += stride) lags.push_back(static_cast<double>(s) * traj.dt());
  }
  const AutocorrelationResult acf = autocorrelation(traj, lags);
  const Eigen::Index K = traj.dim();
  const std::string path = output_path(flags, cfg);
  Sink sink(path, out);
  std::ostream& os = sink.stream();
  os << "lag";
  for (Eigen::Index i = 1; i <= K; ++i)
    for (Eigen::Index j = 1; j <= K; ++j) os << ",acf_" << i << "_" << j;
  for (Eigen::Index i = 1; i <= K; ++i)
    for (Eigen::Index j = 1; j <= K; ++j) os << ",stderr_" << i << "_" << j;
  os << "\n";
  for (std::size_t l = 0; l < acf.lags.size(); ++l) {
    os << format_double(acf.lags[l]);
    for (Eigen::Index i = 0; i < K; ++i)
      for (Eigen::Index j = 0; j < K; ++j) os << ',' << format_double(acf.acf[l](i, j));
    for (Eigen::Index i = 0; i < K; ++i)
      for (Eigen::Index j = 0; j < K; ++j) os << ',' << format_double(acf.std_error[l](i, j));
    os << "\n";
  }
  sink.finish(path);
  if (cfg.intensity) {
    const auto& in = *cfg.intensity;
    report_diagnostic(log, in.alpha() * in.eta().supremum() * in.gshape().supremum(), tc.tcorr);
  } else {
    log << "T_corr=" << format_double(tc.tcorr) << " (no intensity configured; verdict needs alpha)\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  CLI::App app{"Average response of stochastic systems to jump perturbations", "jumpresp"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::vector<std::string> files;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", flags.config, "JSON experiment config");
    if (needs_config) c->required();
    sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
    sub->add_option("--out", flags.out, "output path (default: stdout)");
    sub->add_option("--threads", flags.threads, "worker threads (overrides the config)");
  };
  auto* simulate = app.add_subcommand("simulate", "emit an unperturbed trajectory");
  auto* estimate = app.add_subcommand("estimate", "response estimate from a trajectory");
  auto* oracle = app.add_subcommand("oracle", "analytic OU response curves");
  auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble response");
  auto* compare = app.add_subcommand("compare", "per-lag differences of two curves in SE units");
  auto* acf = app.add_subcommand("acf", "autocorrelation, T_corr and the alpha*T_corr verdict");
  for (auto* sub : {simulate, estimate, oracle, mc, acf}) add_common(sub, true);
  add_common(compare, false);
  compare->add_option("curves", files, "two curve CSV files")->expected(2)->required();

  std::vector<const char*> argv{"jumpresp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags, out, log);
    if (estimate->parsed()) return cmd_estimate(flags, out, log);
    if (oracle->parsed()) return cmd_oracle(flags, out, log);
    if (mc->parsed()) return cmd_mc(flags, out, log);
    if (compare->parsed()) return cmd_compare(flags, files, out, log);
    if (acf->parsed()) return cmd_acf(flags, out, log);
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  log << "error: no subcommand\n";
  return kExitValidation;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace jumpresp
