#include <gtest/gtest.h>

#include <cmath>

#include "jumpresp/analytic_oracle.hpp"
#include "jumpresp/ensemble_mc.hpp"
#include "jumpresp/errors.hpp"
#include "test_util.hpp"

namespace jumpresp {
namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector one(double v) { return Vector::Constant(1, v); }

const ModelSpec kOU = ModelSpec::ou(scalar(2.0), scalar(2.0));

EnsembleConfig small_config(std::int64_t members, double dt, double horizon, std::int64_t stride) {
  EnsembleConfig cfg;
  cfg.members = members;
  cfg.dt = dt;
  cfg.horizon = horizon;
  cfg.output_stride = stride;
  cfg.seed = 77;
  return cfg;
}

TEST(EnsembleConfig, Validation) {
  EnsembleConfig cfg = small_config(10, 0.1, 1.0, 3);
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.output_stride = 5;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.steps(), 10);
  cfg.members = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(EnsembleMC, IdentityJumpIsExactlyZero) {
  const ResponseCurve R = mc_det_jump_response(kOU, AffineJumpMap::shift(one(0.0)), TestFunction::identity(),
                                               small_config(200, 0.01, 1.0, 10));
  EXPECT_EQ(R.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(R.std_error.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EnsembleMC, OUShiftDecaysExponentially) {
  const ResponseCurve R = mc_det_jump_response(kOU, AffineJumpMap::shift(one(1.0)), TestFunction::identity(),
                                               small_config(500, 0.002, 1.0, 50));
  ASSERT_EQ(R.lags.size(), 11u);
  EXPECT_DOUBLE_EQ(R.lags.back(), 1.0);
  for (std::size_t k = 0; k < R.lags.size(); ++k) {
    EXPECT_NEAR(R.values(k, 0), std::exp(-2.0 * R.lags[k]), 1e-3) << "t " << R.lags[k];
  }
}

TEST(EnsembleMC, SingleAtomLawEqualsDeterministic) {
  const EnsembleConfig cfg = small_config(300, 0.01, 0.5, 10);
  const ModelSpec dw = ModelSpec::double_well(0.7);
  const ResponseCurve Rr = mc_random_jump_response(dw, AffineJumpMap(one(0.1), scalar(0.2), scalar(0.5)),
                                                   DiscreteLaw({one(0.4)}, {1.0}), TestFunction::identity(), cfg);
  const ResponseCurve Rd = mc_det_jump_response(dw, AffineJumpMap::deterministic(one(0.1 + 0.5 * 0.4), scalar(0.2)),
                                                TestFunction::identity(), cfg);
  EXPECT_LT((Rr.values - Rd.values).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(EnsembleMC, RandomJumpMatchesOracle) {
  const AffineJumpMap map(one(0.2), scalar(0.0), scalar(1.0));
  const GaussianDensity nu(one(0.5), scalar(0.3));
  const ResponseCurve R = mc_random_jump_response(kOU, map, nu, TestFunction::identity(),
                                                  small_config(2000, 0.002, 1.0, 100));
  const ResponseCurve oracle = ou_mean_response_random(OUParams(scalar(2.0), scalar(2.0)), map, nu, R.lags);
  for (std::size_t k = 0; k < R.lags.size(); ++k) {
    EXPECT_NEAR(R.values(k, 0), oracle.values(k, 0), 4.0 * R.std_error(k, 0) + 1e-3) << "t " << R.lags[k];
  }
}

TEST(EnsembleMC, TinyRateGivesZero) {
  const IntensityModel intensity(1e-12, TimeProfile::constant(1.0), IntensityShape::constant());
  const ResponseCurve R = mc_random_time_response(kOU, AffineJumpMap::shift(one(1.0)), DiscreteLaw({Vector(0)}, {1.0}),
                                                  intensity, TestFunction::identity(), small_config(200, 0.01, 1.0, 10));
  EXPECT_EQ(R.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EnsembleMC, RandomTimeMatchesMeanFormula) {
  const double alpha = 0.5;
  const AffineJumpMap map = AffineJumpMap::shift(one(1.0));
  const IntensityModel intensity(alpha, TimeProfile::constant(1.0), IntensityShape::constant());
  const ResponseCurve R = mc_random_time_response(kOU, map, DiscreteLaw({Vector(0)}, {1.0}), intensity,
                                                  TestFunction::identity(), small_config(4000, 0.005, 2.0, 100));
  const ResponseCurve lead = ou_leading_order_mean(OUParams(scalar(2.0), scalar(2.0)), map, Vector(0), alpha, R.lags);
  for (std::size_t k = 1; k < R.lags.size(); ++k) {
    EXPECT_NEAR(R.values(k, 0), lead.values(k, 0), 4.0 * R.std_error(k, 0) + 2e-3) << "t " << R.lags[k];
  }
}

TEST(EnsembleMC, CommonNoiseReducesVariance) {
  const ModelSpec dw = ModelSpec::double_well(0.7);
  EnsembleConfig cfg = small_config(1000, 0.01, 1.0, 100);
  const AffineJumpMap map = AffineJumpMap::shift(one(0.3));
  const ResponseCurve common = mc_det_jump_response(dw, map, TestFunction::identity(), cfg);
  cfg.common_noise = false;
  const ResponseCurve indep = mc_det_jump_response(dw, map, TestFunction::identity(), cfg);
  for (std::size_t k = 1; k < common.lags.size(); ++k) {
    const double ratio = indep.std_error(k, 0) * indep.std_error(k, 0) / (common.std_error(k, 0) * common.std_error(k, 0));
    EXPECT_GE(ratio, 5.0) << "t " << common.lags[k];
  }
}

TEST(EnsembleMC, DeterministicAcrossThreadCounts) {
  const ModelSpec l96 = ModelSpec::lorenz96(5, 8.0, 0.5);
  Vector h = Vector::Zero(5);
  h(0) = 0.1;
  EnsembleConfig cfg = small_config(64, 0.005, 0.5, 10);
  cfg.pilot_steps = 20000;
  cfg.burn_in = 2000;
  cfg.thin = 50;
  const IntensityModel intensity(0.5, TimeProfile::constant(1.0), IntensityShape::constant());
  const GaussianDensity nu(one(0.0), scalar(1.0));
  const AffineJumpMap map(h, Matrix::Zero(5, 5), Matrix::Constant(5, 1, 0.05));
  cfg.threads = 1;
  const ResponseCurve a = mc_random_time_response(l96, map, nu, intensity, TestFunction::energy(), cfg);
  cfg.threads = 3;
  const ResponseCurve b = mc_random_time_response(l96, map, nu, intensity, TestFunction::energy(), cfg);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(EnsembleMC, InitialStatesFollowSeed) {
  EnsembleConfig cfg = small_config(50, 0.01, 0.1, 1);
  const auto a = ensemble_initial_states(kOU, cfg);
  const auto b = ensemble_initial_states(kOU, cfg);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  cfg.seed = 78;
  EXPECT_NE(ensemble_initial_states(kOU, cfg)[0], a[0]);
}

}  // namespace
}  // namespace jumpresp
