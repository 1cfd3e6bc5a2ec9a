#pragma once

#include <cstdint>

#include "jumpresp/core_model.hpp"
#include "jumpresp/response_estimators.hpp"
#include "jumpresp/sde_engine.hpp"

namespace jumpresp {

struct EnsembleConfig {
  std::int64_t members = 10000;
  double dt = 0.01;
  double horizon = 5.0;
  std::uint64_t seed = 1;
  // Perturbed and unperturbed members share their Brownian increments.
  bool common_noise = true;
  // Record every output_stride-th step.
  std::int64_t output_stride = 1;
  unsigned threads = 1;
  // p0 sampling for non-OU models; zero picks 100 T_corr / dt burn-in and
  // 10 T_corr / dt thinning from a pilot run.
  std::int64_t burn_in = 0;
  std::int64_t thin = 0;
  std::int64_t pilot_steps = 200000;

  void validate() const;
  std::int64_t steps() const;
};

// Initial ensemble drawn from p0 (exact for OU, burned-in chain otherwise).
std::vector<StateVector> ensemble_initial_states(const ModelSpec& model, const EnsembleConfig& cfg);

// Ensemble mean of psi(perturbed) - psi(unperturbed) where the perturbed member
// starts from x0 + h(x0) at t = 0.
ResponseCurve mc_det_jump_response(const ModelSpec& model, const AffineJumpMap& map, const TestFunction& psi,
                                   const EnsembleConfig& cfg);

// As above with z drawn per member from the jump law.
ResponseCurve mc_random_jump_response(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw& law,
                                      const TestFunction& psi, const EnsembleConfig& cfg);

// Perturbed members receive jumps at conditional-intensity times on top of the
// unperturbed member's Brownian path.
ResponseCurve mc_random_time_response(const ModelSpec& model, const AffineJumpMap& map, const JumpLaw& law,
                                      const IntensityModel& intensity, const TestFunction& psi,
                                      const EnsembleConfig& cfg);

}  // namespace jumpresp
