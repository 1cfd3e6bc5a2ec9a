#include <gtest/gtest.h>

#include <cmath>

#include "jumpresp/errors.hpp"
#include "jumpresp/linalg.hpp"
#include "jumpresp/sde_engine.hpp"
#include "test_util.hpp"

namespace jumpresp {
namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector one(double v) { return Vector::Constant(1, v); }

// Mean and standard error of a sequence by non-overlapping batch means.
std::pair<double, double> batch_mean(const std::vector<double>& v, std::size_t batches) {
  const std::size_t len = v.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < len; ++i) means[b] += v[b * len + i];
    means[b] /= static_cast<double>(len);
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= static_cast<double>(batches);
  double var = 0.0;
  for (double x : means) var += (x - m) * (x - m);
  var /= static_cast<double>(batches - 1);
  return {m, std::sqrt(var / static_cast<double>(batches))};
}

TEST(SimulateUnperturbed, FixedPointWithoutNoise) {
  const ModelSpec dw = ModelSpec::double_well(0.0);
  const Trajectory traj = simulate_unperturbed(dw, one(0.0), 0.01, 1000, 3);
  EXPECT_EQ(traj.size(), 1001);
  EXPECT_TRUE((traj.states().array() == 0.0).all());
}

TEST(SimulateUnperturbed, RejectsZeroStep) {
  const ModelSpec ou = ModelSpec::ou(scalar(2.0), scalar(2.0));
  EXPECT_THROW(simulate_unperturbed(ou, one(0.0), 0.0, 10, 1), ValidationError);
  EXPECT_THROW(simulate_ou_exact(scalar(2.0), scalar(2.0), one(0.0), 0.0, 10, 1), ValidationError);
}

TEST(SimulateUnperturbed, OUEnsembleMeanDecays) {
  // E x(t) = e^{-L t} x0; at t = 0.5 with L = 2 this is e^{-1}.
  const ModelSpec ou = ModelSpec::ou(scalar(2.0), scalar(2.0));
  const int members = 10000;
  std::vector<double> end(members);
  for (int m = 0; m < members; ++m) {
    end[static_cast<std::size_t>(m)] = simulate_unperturbed(ou, one(1.0), 1e-3, 500, 1000 + m).states()(500, 0);
  }
  double mean = 0.0, sq = 0.0;
  for (double v : end) mean += v;
  mean /= members;
  for (double v : end) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (members - 1) / members);
  EXPECT_LT(std::abs(mean - std::exp(-1.0)), 3.0 * se);
}

TEST(SimulateUnperturbed, WeakOrderOne) {
  // sigma = 0 double well: x' = x - x^3 has x(t)^2 = 1 / (1 + (1/x0^2 - 1) e^{-2t}).
  const ModelSpec dw = ModelSpec::double_well(0.0);
  const double x0 = 0.5;
  const double exact = 1.0 / std::sqrt(1.0 + (1.0 / (x0 * x0) - 1.0) * std::exp(-2.0));
  auto error = [&](double dt) {
    const auto n = static_cast<std::int64_t>(std::llround(1.0 / dt));
    return std::abs(simulate_unperturbed(dw, one(x0), dt, n, 1).states()(n, 0) - exact);
  };
  const double ratio = error(0.01) / error(0.005);
  EXPECT_NEAR(ratio, 2.0, 0.05);
}

TEST(SimulateUnperturbed, GeneratorConsistency) {
  Rng rng(7);
  const Matrix L = testing::random_stable(rng, 2);
  const Matrix G = testing::random_matrix(rng, 2, 2);
  const ModelSpec ou = ModelSpec::ou(L, G);
  Vector x0(2);
  x0 << 0.7, -0.4;
  const double eps = 0.01;
  const int n = 100000;
  Vector sum1 = Vector::Zero(2), sq1 = Vector::Zero(2);
  Matrix sum2 = Matrix::Zero(2, 2), sq2 = Matrix::Zero(2, 2);
  for (int m = 0; m < n; ++m) {
    const Vector x = simulate_unperturbed(ou, x0, eps, 1, 50000 + m).state(1);
    const Vector d1 = (x - x0) / eps;
    const Matrix d2 = (x * x.transpose() - x0 * x0.transpose()) / eps;
    sum1 += d1;
    sq1 += d1.cwiseProduct(d1);
    sum2 += d2;
    sq2 += d2.cwiseProduct(d2);
  }
  const Vector mean1 = sum1 / n;
  const Matrix mean2 = sum2 / n;
  const Vector se1 = ((sq1 / n - mean1.cwiseProduct(mean1)) / (n - 1)).cwiseSqrt();
  const Matrix se2 = ((sq2 / n - mean2.cwiseProduct(mean2)) / (n - 1)).cwiseSqrt();
  const Vector gen1 = -L * x0;
  const Matrix gen2 = -L * x0 * x0.transpose() - x0 * x0.transpose() * L.transpose() + G * G.transpose();
  // O(eps) bias bound: eps * |L^2 x0 x0^T-type terms|.
  const double bias = eps * 4.0 * (L.norm() * L.norm() * x0.squaredNorm() + L.norm() * G.squaredNorm());
  for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(mean1[i] - gen1[i]), 3.0 * se1[i] + bias);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(mean2(i, j) - gen2(i, j)), 3.0 * se2(i, j) + bias);
}

TEST(SimulateUnperturbed, SameSeedIsBitIdentical) {
  const ModelSpec l96 = ModelSpec::lorenz96(6, 8.0, 0.5);
  Vector x0 = Vector::Constant(6, 8.0);
  x0[0] += 0.01;
  const Trajectory a = simulate_unperturbed(l96, x0, 0.005, 2000, 99);
  const Trajectory b = simulate_unperturbed(l96, x0, 0.005, 2000, 99);
  EXPECT_TRUE(a.states() == b.states());
}

TEST(SimulateUnperturbed, BlowUpIsNumericalError) {
  const ModelSpec dw = ModelSpec::double_well(0.0);
  EXPECT_THROW(simulate_unperturbed(dw, one(50.0), 0.5, 100, 1), NumericalError);
}

TEST(OUTransition, StepCovarianceScalarFormula) {
  const Matrix L = Matrix::Identity(3, 3);
  const Matrix G = std::sqrt(2.0) * Matrix::Identity(3, 3);
  const double dt = 0.3;
  const OUTransition tr = ou_transition(L, G, dt);
  EXPECT_LT((tr.step_cov - (1.0 - std::exp(-2.0 * dt)) * Matrix::Identity(3, 3)).norm(), 1e-13);
  EXPECT_LT((tr.noise_factor * tr.noise_factor.transpose() - tr.step_cov).norm(), 1e-13);
}

TEST(OUTransition, ZeroStepIsIdentityKernel) {
  Rng rng(2);
  const Matrix L = testing::random_stable(rng, 3);
  const OUTransition tr = ou_transition(L, testing::random_matrix(rng, 3, 3), 0.0);
  EXPECT_TRUE(tr.phi.isIdentity(0.0));
  EXPECT_LT(tr.step_cov.norm(), 1e-12);
  // A trajectory propagated by this kernel stays constant.
  Vector x = testing::random_vector(rng, 3);
  const Vector x0 = x;
  for (int k = 0; k < 10; ++k) x = tr.phi * x + tr.noise_factor * testing::random_vector(rng, 3);
  EXPECT_LT((x - x0).norm(), 1e-5);
}

TEST(SimulateOUExact, LargeStepDecorrelates) {
  Rng rng(4);
  const Matrix L = testing::random_stable(rng, 2);
  const Matrix G = testing::random_matrix(rng, 2, 2) + Matrix::Identity(2, 2);
  const Matrix C = ou_stationary_covariance(L, G);
  const double dt = 50.0 / min_real_eigenvalue(L);
  const std::int64_t n = 40000;
  const Trajectory traj = simulate_ou_exact(L, G, Vector::Zero(2), dt, n, 8);
  const Trajectory tail = traj.tail(1);
  const MomentEstimate est = estimate_moments(tail);
  const double nn = static_cast<double>(tail.size());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((C(i, i) * C(j, j) + C(i, j) * C(i, j)) / nn);
      EXPECT_LT(std::abs(est.cov(i, j) - C(i, j)), 3.0 * se) << i << "," << j;
    }
  // Successive states are uncorrelated.
  double lag1 = 0.0;
  for (Eigen::Index s = 0; s + 1 < tail.size(); ++s) lag1 += tail.states()(s, 0) * tail.states()(s + 1, 0);
  lag1 /= nn - 1.0;
  EXPECT_LT(std::abs(lag1), 3.0 * C(0, 0) / std::sqrt(nn));
}

TEST(SampleStationary, OUDiagonalCovariance) {
  Matrix L = Matrix::Zero(2, 2), G = Matrix::Zero(2, 2);
  L.diagonal() << 1.0, 2.0;
  G.diagonal() << std::sqrt(2.0), 2.0;
  const ModelSpec ou = ModelSpec::ou(L, G);
  const std::int64_t n = 50000;
  const auto samples = sample_stationary(ou, n, 12);
  ASSERT_EQ(static_cast<std::int64_t>(samples.size()), n);
  StateMatrix X(n, 2);
  for (std::int64_t i = 0; i < n; ++i) X.row(i) = samples[static_cast<std::size_t>(i)].transpose();
  const MomentEstimate est = estimate_moments(Trajectory(1.0, X));
  const double se_diag = std::sqrt(2.0 / static_cast<double>(n));
  const double se_off = std::sqrt(1.0 / static_cast<double>(n));
  EXPECT_LT(std::abs(est.cov(0, 0) - 1.0), 3.0 * se_diag);
  EXPECT_LT(std::abs(est.cov(1, 1) - 1.0), 3.0 * se_diag);
  EXPECT_LT(std::abs(est.cov(0, 1)), 3.0 * se_off);
}

TEST(SampleStationary, ZeroSamples) {
  EXPECT_TRUE(sample_stationary(ModelSpec::double_well(0.7), 0, 1).empty());
}

TEST(SampleStationary, DoubleWellSymmetricMean) {
  StationarySampling opts;
  opts.dt = 0.01;
  opts.burn_in = 20000;
  opts.thin = 500;
  const auto samples = sample_stationary(ModelSpec::double_well(0.7), 4000, 17, opts);
  std::vector<double> v;
  for (const auto& s : samples) v.push_back(s[0]);
  const auto [mean, se] = batch_mean(v, 40);
  EXPECT_LT(std::abs(mean), 3.0 * se);
  // Bimodal: most mass away from the barrier.
  int near_wells = 0;
  for (double x : v) near_wells += std::abs(x) > 0.3;
  EXPECT_GT(near_wells, static_cast<int>(v.size()) / 2);
}

IntensityModel constant_intensity(double alpha) {
  return IntensityModel(alpha, TimeProfile::constant(1.0), IntensityShape::constant());
}

TEST(Thinning, HomogeneousInterArrivalMean) {
  const IntensityModel in = constant_intensity(2.0);
  Rng rng(5);
  const Vector x = Vector::Zero(1);
  const int n = 10000;
  double sum = 0.0;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto next = next_jump_time(in, [&](double) -> const Vector& { return x; }, t, 1e18, rng);
    ASSERT_TRUE(next.has_value());
    sum += *next - t;
    t = *next;
  }
  const double mean = sum / n;
  EXPECT_LT(std::abs(mean - 0.5), 3.0 * 0.5 / std::sqrt(n));
}

TEST(Thinning, PastHorizonGivesNothing) {
  const IntensityModel in = constant_intensity(1.0);
  Rng rng(5);
  const Vector x = Vector::Zero(1);
  EXPECT_FALSE(next_jump_time(in, [&](double) -> const Vector& { return x; }, 2.0, 2.0, rng).has_value());
  EXPECT_FALSE(next_jump_time(in, [&](double) -> const Vector& { return x; }, 3.0, 2.0, rng).has_value());
}

TEST(Thinning, PoissonCountsChiSquare) {
  // alpha T = 3; bins 0..7 and >= 8.
  const IntensityModel in = constant_intensity(1.5);
  const double T = 2.0, mu = 3.0;
  const Vector x = Vector::Zero(1);
  const int runs = 10000;
  std::vector<int> counts(9, 0);
  for (int r = 0; r < runs; ++r) {
    Rng rng = make_rng(77, Stream::kJumpTimes, static_cast<std::uint64_t>(r));
    int k = 0;
    double t = 0.0;
    while (auto next = next_jump_time(in, [&](double) -> const Vector& { return x; }, t, T, rng)) {
      t = *next;
      ++k;
    }
    ++counts[static_cast<std::size_t>(std::min(k, 8))];
  }
  double chi2 = 0.0;
  double tail = 1.0;
  for (int k = 0; k < 9; ++k) {
    double p = std::exp(-mu) * std::pow(mu, k) / std::tgamma(k + 1.0);
    if (k == 8) p = tail;
    tail -= p;
    const double expected = p * runs;
    chi2 += (counts[static_cast<std::size_t>(k)] - expected) * (counts[static_cast<std::size_t>(k)] - expected) / expected;
  }
  EXPECT_LT(chi2, 20.09);  // chi-square 99th percentile, 8 degrees of freedom
}

TEST(Thinning, FarBumpSuppressesJumps) {
  // p0 = N(0, 1), bump at 10 sigma: alpha E[g] = alpha sqrt(1/2) e^{-25} is negligible.
  const ModelSpec ou = ModelSpec::ou(scalar(1.0), scalar(std::sqrt(2.0)));
  const IntensityModel in(1.0, TimeProfile::constant(1.0), IntensityShape::bump(one(10.0), scalar(1.0)));
  const PerturbedRun run = simulate_perturbed(ou, AffineJumpMap::shift(one(0.1)), DiscreteLaw({Vector(0)}, {1.0}), in,
                                              one(0.0), 0.01, 100000, 4);
  EXPECT_LT(static_cast<double>(run.events.size()), 0.01 * 1.0 * 1000.0);
}

TEST(SimulatePerturbed, VanishingRateMatchesUnperturbed) {
  const ModelSpec ou = ModelSpec::ou(scalar(1.0), scalar(std::sqrt(2.0)));
  const PerturbedRun run = simulate_perturbed(ou, AffineJumpMap::shift(one(1.0)), DiscreteLaw({Vector(0)}, {1.0}),
                                              constant_intensity(1e-12), one(0.3), 0.01, 5000, 21);
  const Trajectory ref = simulate_unperturbed(ou, one(0.3), 0.01, 5000, 21);
  EXPECT_TRUE(run.events.empty());
  EXPECT_TRUE(run.trajectory.states() == ref.states());
}

TEST(SimulatePerturbed, SingleAtomLawAndEventConsistency) {
  const ModelSpec ou = ModelSpec::ou(scalar(1.0), scalar(std::sqrt(2.0)));
  const AffineJumpMap map(one(0.2), scalar(0.1), scalar(1.0));
  const PerturbedRun run =
      simulate_perturbed(ou, map, DiscreteLaw({one(0.7)}, {1.0}), constant_intensity(2.0), one(0.0), 0.01, 5000, 9);
  ASSERT_GT(run.events.size(), 20u);
  for (const auto& e : run.events) {
    EXPECT_EQ(e.z[0], 0.7);
    const StateVector post = apply_jump(map, e.pre_state, e.z);
    EXPECT_TRUE(post == e.post_state);
  }
}

TEST(SimulatePerturbed, Deterministic) {
  const ModelSpec dw = ModelSpec::double_well(0.7);
  const JumpLaw law = GaussianDensity(one(0.0), scalar(0.25));
  const AffineJumpMap map(one(0.1), scalar(0.0), scalar(1.0));
  const IntensityModel in(0.5, TimeProfile::table({{0.0, 1.0}, {10.0, 2.0}}), IntensityShape::bump(one(1.0), scalar(0.5)));
  const PerturbedRun a = simulate_perturbed(dw, map, law, in, one(1.0), 0.01, 3000, 5);
  const PerturbedRun b = simulate_perturbed(dw, map, law, in, one(1.0), 0.01, 3000, 5);
  EXPECT_TRUE(a.trajectory.states() == b.trajectory.states());
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) EXPECT_EQ(a.events[i].time, b.events[i].time);
}

TEST(SimulatePerturbed, LongRunMeanShift) {
  // Stationary shift of the mean under Poisson jumps: alpha h / L = 0.05.
  const ModelSpec ou = ModelSpec::ou(scalar(1.0), scalar(std::sqrt(2.0)));
  const AffineJumpMap map = AffineJumpMap::shift(one(1.0));
  const JumpLaw law = DiscreteLaw({Vector(0)}, {1.0});
  const double dt = 0.05;
  const int members = 20000;
  const std::int64_t steps = 2000;  // t = 100
  double sum = 0.0, sq = 0.0;
  for (int m = 0; m < members; ++m) {
    const PerturbedRun run = simulate_perturbed(ou, map, law, constant_intensity(0.05), one(0.0), dt, steps, 300 + m);
    const double v = run.trajectory.states()(steps, 0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / members;
  const double se = std::sqrt((sq / members - mean * mean) / (members - 1));
  EXPECT_LT(std::abs(mean - 0.05), 3.0 * se);
}

}  // namespace
}  // namespace jumpresp
