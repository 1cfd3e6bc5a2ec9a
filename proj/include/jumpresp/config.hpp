#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumpresp/core_model.hpp"
#include "jumpresp/ensemble_mc.hpp"
#include "jumpresp/response_estimators.hpp"
#include "jumpresp/sde_engine.hpp"

namespace jumpresp {

enum class Scenario { kDeterministic, kRandom, kRandomTime };

// Source of the unperturbed trajectory for `estimate` and `acf`.
struct TrajectorySettings {
  std::optional<std::string> input;  // read from file when set
  double dt = 0.01;
  std::int64_t steps = 100000;
  std::int64_t burn_in = 0;
  bool exact_ou = true;  // OU models use the exact transition
  Vector x0;             // zero when empty
};

struct P0Settings {
  enum class Kind { kExact, kQuasiGaussian, kMixtureFit, kExplicit };
  Kind kind = Kind::kQuasiGaussian;
  int components = 2;
  std::optional<Density> density;
};

struct OracleSettings {
  enum class Curve { kResponse, kExactMean, kLeadingOrder };
  Curve curve = Curve::kResponse;
};

struct ExperimentConfig {
  std::optional<ModelSpec> model;
  std::optional<AffineJumpMap> jump;
  std::optional<JumpLaw> law;
  std::optional<IntensityModel> intensity;
  Scenario scenario = Scenario::kDeterministic;
  TestFunction psi = TestFunction::identity();
  std::vector<double> lags;
  TrajectorySettings trajectory;
  P0Settings p0;
  EstimatorOptions estimator;
  bool convolve = false;
  EnsembleConfig ensemble;
  OracleSettings oracle;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::optional<std::string> output;

  // Cross-checks dimensions of every present block.
  void validate() const;
};

// Parses and validates JSON text. Errors carry the JSON pointer of the
// offending value and its line in `text`.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

std::string to_string(Scenario s);

}  // namespace jumpresp
