#include <gtest/gtest.h>

#include <cmath>

#include "jumpresp/core_model.hpp"
#include "jumpresp/errors.hpp"
#include "jumpresp/sde_engine.hpp"
#include "test_util.hpp"

namespace jumpresp {
namespace {

using testing::normal_pdf;
using testing::random_matrix;
using testing::random_spd;
using testing::random_vector;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

TEST(GaussianDensity, StandardNormalPeak) {
  const GaussianDensity g(vec({0.0}), scalar(1.0));
  EXPECT_NEAR(g.pdf(vec({0.0})), 0.3989422804014327, 1e-15);
}

TEST(GaussianDensity, PeakAtMeanMatchesDeterminant) {
  Rng rng(3);
  for (int K = 1; K <= 5; ++K) {
    const Matrix C = random_spd(rng, K);
    const Vector m = random_vector(rng, K);
    const GaussianDensity g(m, C);
    const double expected = 1.0 / std::sqrt(std::pow(2.0 * M_PI, K) * C.determinant());
    EXPECT_NEAR(g.pdf(m) / expected, 1.0, 1e-12) << "K=" << K;
  }
}

TEST(GaussianDensity, RejectsIndefiniteCovariance) {
  Matrix C(2, 2);
  C << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussianDensity(Vector::Zero(2), C), NotPositiveDefinite);
}

TEST(GaussianDensity, RejectsAsymmetricCovariance) {
  Matrix C(2, 2);
  C << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(GaussianDensity(Vector::Zero(2), C), ValidationError);
}

TEST(GaussianMixture, SymmetricPairAtOrigin) {
  const GaussianMixture m({0.5, 0.5}, {GaussianDensity(vec({-1.0}), scalar(1.0)), GaussianDensity(vec({1.0}), scalar(1.0))});
  EXPECT_NEAR(m.pdf(vec({0.0})), normal_pdf(1.0), 1e-15);
  EXPECT_NEAR(m.pdf(vec({0.0})), 0.2419707, 1e-7);
}

TEST(GaussianMixture, SingleComponentEqualsComponentExactly) {
  Rng rng(5);
  const GaussianDensity g(random_vector(rng, 3), random_spd(rng, 3));
  const Density mix = GaussianMixture({1.0}, {g});
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_vector(rng, 3);
    EXPECT_EQ(eval_density(mix, x), eval_density(Density(g), x));
  }
}

TEST(GaussianMixture, NonnegativeAndWeightsChecked) {
  Rng rng(6);
  const GaussianMixture m({0.3, 0.7}, {GaussianDensity(Vector::Zero(2), random_spd(rng, 2)),
                                       GaussianDensity(Vector::Constant(2, 3.0), random_spd(rng, 2))});
  for (int i = 0; i < 200; ++i) EXPECT_GE(m.pdf(5.0 * random_vector(rng, 2)), 0.0);
  EXPECT_THROW(GaussianMixture({0.5, 0.6}, m.components()), ValidationError);
  EXPECT_THROW(GaussianMixture({-0.1, 1.1}, m.components()), ValidationError);
}

TEST(GaussianMixture, FarTailLogPdfIsFinite) {
  const GaussianMixture m({0.5, 0.5}, {GaussianDensity(vec({-1.0}), scalar(1.0)), GaussianDensity(vec({1.0}), scalar(1.0))});
  const double lp = m.log_pdf(vec({60.0}));
  EXPECT_TRUE(std::isfinite(lp));
  // Dominated by the +1 component far out.
  EXPECT_NEAR(lp, std::log(0.5) + std::log(normal_pdf(0.0)) - 0.5 * 59.0 * 59.0, 1e-9);
}

TEST(EstimateMoments, ConstantTrajectoryIsDegenerate) {
  StateMatrix X = StateMatrix::Constant(50, 1, 3.0);
  const MomentEstimate est = estimate_moments(Trajectory(0.1, X));
  EXPECT_DOUBLE_EQ(est.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(est.cov(0, 0), 0.0);
  EXPECT_TRUE(est.degenerate);
  EXPECT_THROW(fit_quasi_gaussian(Trajectory(0.1, X)), ValidationError);
}

TEST(EstimateMoments, TwoSamples) {
  StateMatrix X(2, 1);
  X << 0.0, 2.0;
  const MomentEstimate est = estimate_moments(Trajectory(1.0, X));
  EXPECT_DOUBLE_EQ(est.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(est.cov(0, 0), 2.0);
  EXPECT_FALSE(est.degenerate);
}

TEST(EstimateMoments, ExactOUStationaryMoments) {
  // L = 2, G = 2: 2 L C = G^2 gives C = 1. Sample spacing 0.5 keeps the
  // lag-one correlation at e^{-1}; SEs use the AR(1) variance inflation.
  const Matrix L = scalar(2.0), G = scalar(2.0);
  const double dt = 0.5;
  const Eigen::Index n = 200000;
  const Trajectory traj = simulate_ou_exact(L, G, Vector::Zero(1), dt, n, 11);
  const MomentEstimate est = estimate_moments(traj);
  const double rho = std::exp(-2.0 * dt);
  const double se_mean = std::sqrt((1.0 + rho) / (1.0 - rho) / static_cast<double>(n));
  const double se_var = std::sqrt(2.0 * (1.0 + rho * rho) / (1.0 - rho * rho) / static_cast<double>(n));
  EXPECT_LT(std::abs(est.mean[0]), 3.0 * se_mean);
  EXPECT_LT(std::abs(est.cov(0, 0) - 1.0), 3.0 * se_var);
}

TEST(FitGaussianMixture, RecoversSeparatedComponents) {
  Rng rng(21);
  const Eigen::Index n = 20000;
  StateMatrix X(n, 1);
  std::normal_distribution<double> z(0.0, 0.3);
  for (Eigen::Index i = 0; i < n; ++i) X(i, 0) = (i % 4 == 0 ? -2.0 : 1.5) + z(rng);
  const GaussianMixture fit = fit_gaussian_mixture(Trajectory(1.0, X), 2);
  ASSERT_EQ(fit.size(), 2u);
  const auto& c = fit.components();
  const int lo = c[0].mean()[0] < c[1].mean()[0] ? 0 : 1;
  EXPECT_NEAR(c[lo].mean()[0], -2.0, 0.02);
  EXPECT_NEAR(c[1 - lo].mean()[0], 1.5, 0.02);
  EXPECT_NEAR(fit.weights()[lo], 0.25, 0.01);
  EXPECT_NEAR(std::sqrt(c[lo].cov()(0, 0)), 0.3, 0.01);
}

TEST(AffineJump, ApplyExamples) {
  EXPECT_DOUBLE_EQ(apply_jump(AffineJumpMap::shift(vec({1.0})), vec({5.0}))[0], 6.0);
  EXPECT_DOUBLE_EQ(apply_jump(AffineJumpMap::deterministic(vec({0.0}), scalar(1.0)), vec({2.0}))[0], 4.0);
  const AffineJumpMap m(vec({1.0, 0.0}), Matrix::Zero(2, 2), Matrix::Identity(2, 2));
  const StateVector y = apply_jump(m, vec({0.0, 0.0}), vec({2.0, 3.0}));
  EXPECT_DOUBLE_EQ(y[0], 3.0);
  EXPECT_DOUBLE_EQ(y[1], 3.0);
}

TEST(AffineJump, InvertExamples) {
  const InverseJump a = invert_jump(AffineJumpMap::shift(vec({1.0})), vec({4.0}));
  EXPECT_DOUBLE_EQ(a.xhat[0], 3.0);
  EXPECT_DOUBLE_EQ(a.jacobian, 1.0);
  const InverseJump b = invert_jump(AffineJumpMap::deterministic(vec({1.0}), scalar(1.0)), vec({5.0}));
  EXPECT_DOUBLE_EQ(b.xhat[0], 2.0);
  EXPECT_DOUBLE_EQ(b.jacobian, 0.5);
  EXPECT_THROW(AffineJumpMap::deterministic(vec({0.0}), scalar(-1.0)), NonInvertibleJump);
}

TEST(AffineJump, RoundTripAndJacobianProperty) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index K = 1 + trial % 5;
    const Eigen::Index d = trial % 3;
    const AffineJumpMap map(random_vector(rng, K), 0.4 * random_matrix(rng, K, K), random_matrix(rng, K, d));
    const Vector x = random_vector(rng, K);
    const Vector z = random_vector(rng, d);
    const InverseJump inv = invert_jump(map, x, z);
    const StateVector back = apply_jump(map, inv.xhat, z);
    EXPECT_LT((back - x).norm(), 1e-10 * std::max(1.0, x.norm()));
    EXPECT_NEAR(inv.jacobian * map.abs_det(), 1.0, 1e-12);
  }
}

TEST(AffineJump, EmptyHstarAcceptsEmptyZ) {
  const AffineJumpMap map = AffineJumpMap::shift(vec({1.0, 2.0}));
  EXPECT_EQ(map.noise_dim(), 0);
  EXPECT_FALSE(map.z_coupled());
  const StateVector y = apply_jump(map, vec({0.0, 0.0}), Vector(0));
  EXPECT_DOUBLE_EQ(y[1], 2.0);
}

TEST(Collision, FullExchange) {
  CollisionJumpSpec spec{{0}, {1}, vec({1.0})};
  Rng rng(1);
  const StateVector y = collision_transform(spec, vec({1.0, 3.0}), rng);
  EXPECT_DOUBLE_EQ(y[0], 3.0);
  EXPECT_DOUBLE_EQ(y[1], 1.0);
}

TEST(Collision, OrthogonalDirectionIsIdentity) {
  const Vector x = vec({1.0, 2.0, 4.0, 3.0});  // y = (1, 2), z = (4, 3), z - y = (3, 1)
  Vector n = vec({-1.0, 3.0});
  n.normalize();
  CollisionJumpSpec spec{{0, 1}, {2, 3}, n};
  Rng rng(1);
  const StateVector y = collision_transform(spec, x, rng);
  EXPECT_LT((y - x).norm(), 1e-15);
}

TEST(Collision, PreservesEnergy) {
  Rng rng(41);
  CollisionJumpSpec spec{{0, 2, 4}, {1, 3, 5}, std::nullopt};
  for (int i = 0; i < 1000; ++i) {
    const Vector x = 3.0 * random_vector(rng, 6);
    const StateVector y = collision_transform(spec, x, rng);
    EXPECT_NEAR(y.squaredNorm() / x.squaredNorm(), 1.0, 1e-12);
  }
}

TEST(Collision, RejectsOverlappingIndices) {
  CollisionJumpSpec spec{{0}, {0}, std::nullopt};
  EXPECT_THROW(spec.validate(2), ValidationError);
}

TEST(DiscreteLaw, Validation) {
  EXPECT_THROW(DiscreteLaw({vec({1.0}), vec({1.0})}, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(DiscreteLaw({vec({1.0}), vec({2.0})}, {0.5, 0.4}), ValidationError);
  const DiscreteLaw law({vec({-1.0}), vec({1.0})}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(law_mean(law)[0], 0.0);
}

TEST(TimeProfile, TableInterpolatesAndClamps) {
  const TimeProfile eta = TimeProfile::table({{0.0, 1.0}, {1.0, 3.0}});
  EXPECT_DOUBLE_EQ(eta(0.5), 2.0);
  EXPECT_DOUBLE_EQ(eta(-1.0), 1.0);
  EXPECT_DOUBLE_EQ(eta(5.0), 3.0);
  EXPECT_DOUBLE_EQ(eta.supremum(), 3.0);
  EXPECT_THROW(TimeProfile::constant(-1.0), ValidationError);
}

TEST(IntensityShape, BumpAndSupremum) {
  const IntensityShape b = IntensityShape::bump(vec({1.0}), scalar(4.0));
  EXPECT_DOUBLE_EQ(b(vec({1.0})), 1.0);
  EXPECT_NEAR(b(vec({3.0})), std::exp(-0.5), 1e-15);
  EXPECT_DOUBLE_EQ(b.supremum(), 1.0);
  const IntensityShape m = IntensityShape::bump_mixture(
      {0.5, 2.0}, {GaussianDensity(vec({0.0}), scalar(1.0)), GaussianDensity(vec({5.0}), scalar(1.0))});
  EXPECT_DOUBLE_EQ(m.supremum(), 2.5);
  EXPECT_DOUBLE_EQ(IntensityShape::constant().supremum(), 1.0);
}

}  // namespace
}  // namespace jumpresp
