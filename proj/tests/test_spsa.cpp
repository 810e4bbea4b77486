#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dqpt/spsa.hpp"

using namespace dqpt;

namespace {

RVector target() {
  RVector t(4);
  t << 0.5, -1.0, 2.0, 0.25;
  return t;
}

double quadratic(const RVector& x) { return (x - target()).squaredNorm(); }

}  // namespace

TEST(SpsaSchedule, Validation) {
  SpsaSchedule s;
  EXPECT_NO_THROW(s.validate());
  SpsaSchedule bad = s;
  bad.alpha = 0.5;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = s;
  bad.gamma = 0.6;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = s;
  bad.a = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = s;
  bad.steps = -1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = s;
  bad.max_step = -0.1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(SpsaSchedule, GainSequences) {
  const SpsaSchedule s = SpsaSchedule::with_steps(50);
  EXPECT_DOUBLE_EQ(s.A, 5.0);
  EXPECT_DOUBLE_EQ(s.gain(0), s.a / std::pow(6.0, s.alpha));
  EXPECT_DOUBLE_EQ(s.perturbation(3), s.c / std::pow(4.0, s.gamma));
  EXPECT_GT(s.gain(0), s.gain(10));
  EXPECT_GT(s.perturbation(0), s.perturbation(10));
}

TEST(Spsa, ZeroStepsReturnsSeed) {
  SpsaSchedule s;
  s.steps = 0;
  const RVector seed = RVector::Constant(4, 0.3);
  const SpsaResult r = spsa_optimize(quadratic, seed, s, 1);
  EXPECT_EQ(r.x, seed);
  EXPECT_EQ(r.evaluations, 0);
  EXPECT_TRUE(r.cost_history.empty());
}

TEST(Spsa, ConvergesOnNoiselessQuadratic) {
  SpsaSchedule s = SpsaSchedule::with_steps(500);
  s.a = 0.1;
  const RVector seed = RVector::Zero(4);
  const double initial = (seed - target()).norm();
  for (std::uint64_t rng_seed = 1; rng_seed <= 20; ++rng_seed) {
    const SpsaResult r = spsa_optimize(quadratic, seed, s, rng_seed);
    EXPECT_LT((r.x - target()).norm(), 0.1 * initial) << "seed " << rng_seed;
    EXPECT_EQ(r.evaluations, 1000);
    EXPECT_EQ(r.cost_history.size(), 500u);
  }
}

TEST(Spsa, ConvergesUnderNoise) {
  std::mt19937_64 noise_rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  auto noisy = [&](const RVector& x) { return quadratic(x) + noise(noise_rng); };
  SpsaSchedule s = SpsaSchedule::with_steps(1000);
  s.a = 0.1;
  const SpsaResult r = spsa_optimize(noisy, RVector::Zero(4), s, 5);
  EXPECT_LT((r.x - target()).norm(), 0.1 * target().norm());
}

TEST(Spsa, DeterministicGivenSeed) {
  const SpsaSchedule s = SpsaSchedule::with_steps(30);
  const SpsaResult a = spsa_optimize(quadratic, RVector::Zero(4), s, 42);
  const SpsaResult b = spsa_optimize(quadratic, RVector::Zero(4), s, 42);
  const SpsaResult c = spsa_optimize(quadratic, RVector::Zero(4), s, 43);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.cost_history, b.cost_history);
  EXPECT_NE(a.x, c.x);
}

TEST(Spsa, MaxStepClipsEachUpdate) {
  SpsaSchedule s = SpsaSchedule::with_steps(1);
  s.a = 1000.0;
  s.max_step = 0.02;
  const RVector seed = RVector::Zero(4);
  const SpsaResult r = spsa_optimize(quadratic, seed, s, 7);
  EXPECT_LE((r.x - seed).lpNorm<Eigen::Infinity>(), 0.02 + 1e-15);
  EXPECT_GT((r.x - seed).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Spsa, CalibratedGainSetsFirstMove) {
  // Cost x0 in one dimension: every gradient estimate is exactly +-1, so the
  // calibrated first update moves by max_move.
  auto linear = [](const RVector& x) { return x(0); };
  SpsaSchedule s = SpsaSchedule::with_steps(10);
  const GainCalibration cal = calibrate_gain(linear, RVector::Zero(1), s, 3, 8, 0.05);
  EXPECT_EQ(cal.evaluations, 16);
  s.a = cal.a;
  s.steps = 1;
  const SpsaResult r = spsa_optimize(linear, RVector::Zero(1), s, 11);
  EXPECT_NEAR(r.x(0), -0.05, 1e-12);
  EXPECT_THROW(calibrate_gain(linear, RVector::Zero(1), s, 3, 0), InvalidArgument);
}

TEST(Spsa, FlatCostKeepsDefaultGain) {
  const SpsaSchedule s;
  auto flat = [](const RVector&) { return 1.0; };
  EXPECT_EQ(calibrate_gain(flat, RVector::Zero(3), s, 1).a, s.a);
}
