#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpcm/error.hpp"
#include "cpcm/optimizer.hpp"
#include "cpcm/simulate.hpp"

using namespace cpcm;
using copula::Family;
using weibull::WeibullParams;

namespace {

ModelParams truth(Family f, double a, double l1 = 1.5) {
  return {WeibullParams(1.8, 1.2), WeibullParams(2.1, l1), a, a, a, f};
}

Series simulated(Family f, double a, int length, int tau, std::uint64_t seed, double l1 = 1.5) {
  return gen_series(truth(f, a, l1), ChangePoint(tau, length), length, seed);
}

}  // namespace

TEST(NewtonConfig, RejectsBadSettings) {
  NewtonConfig c;
  c.epsilon = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.tau_min = 10;
  c.tau_max = 5;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_NO_THROW(NewtonConfig{}.validate());
}

TEST(DefaultInit, MatchesSegmentMoments) {
  const Series s = simulated(Family::Clayton, 2, 200, 100, 7);
  const ModelParams p = default_init(s, ChangePoint(100, 200));
  EXPECT_NO_THROW(p.validate());
  double m0 = 0;
  for (int i = 0; i < 100; ++i) m0 += s[i];
  m0 /= 100;
  EXPECT_NEAR(weibull::moments(p.gamma0).mean, m0, 1e-9 * m0);
  EXPECT_EQ(p.alpha0, 2.0);
  EXPECT_EQ(p.alpha1, 2.0);
}

TEST(FitAtTau, StationaryPointIsLocalMaximum) {
  for (Family f : {Family::Clayton, Family::Joe}) {
    const Series s = simulated(f, 2, 150, 75, 11);
    const ChangePoint cp(75, 150);
    const InnerFit fit = fit_at_tau(s, cp, f, 2.0, std::nullopt, NewtonConfig{});
    ASSERT_TRUE(fit.converged);
    const TransformedParams tp = likelihood::transform(fit.params);
    const Vector6 g = likelihood::gradient(s, tp, cp, f, 2.0);
    EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-6);

    // No nearby point does better.
    std::mt19937_64 gen(3);
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (int trial = 0; trial < 50; ++trial) {
      Vector6 x = tp.as_vector();
      for (int i = 0; i < 6; ++i) x[i] += noise(gen);
      const double ll = likelihood::log_likelihood(
          s, likelihood::untransform(TransformedParams::from_vector(x), f, 2.0), cp);
      EXPECT_LE(ll, fit.loglik + 1e-12);
    }
    EXPECT_GE(fit.loglik, likelihood::log_likelihood(s, default_init(s, cp, f), cp));
  }
}

TEST(FitAtTau, RestartFromOptimumTakesNoSteps) {
  const Series s = simulated(Family::Clayton, 2, 120, 60, 5);
  const ChangePoint cp(60, 120);
  const InnerFit first = fit_at_tau(s, cp, Family::Clayton, 2.0, std::nullopt, NewtonConfig{});
  const InnerFit again = fit_at_tau(s, cp, Family::Clayton, 2.0, first.params, NewtonConfig{});
  EXPECT_EQ(again.iterations, 0);
  EXPECT_EQ(again.loglik, first.loglik);
}

TEST(FitAtTau, TraceShrinks) {
  const Series s = simulated(Family::Joe, 3, 200, 100, 9);
  const InnerFit fit =
      fit_at_tau(s, ChangePoint(100, 200), Family::Joe, 2.0, std::nullopt, NewtonConfig{});
  ASSERT_FALSE(fit.trace.empty());
  EXPECT_EQ(static_cast<int>(fit.trace.size()), fit.iterations);
  EXPECT_LT(fit.trace.back(), fit.trace.front());
}

TEST(FitAtTau, IterationCapThrows) {
  const Series s = simulated(Family::Clayton, 2, 100, 50, 2);
  NewtonConfig cfg;
  cfg.max_iters = 1;
  EXPECT_THROW(fit_at_tau(s, ChangePoint(50, 100), Family::Clayton, 2.0, std::nullopt, cfg),
               NonConvergence);
}

TEST(FitAtTau, NegativeClaytonBoxIsOptIn) {
  // Anti-persistent data pushes alpha0 toward its lower bound.
  const Series s = simulated(Family::Clayton, 0.05, 200, 100, 13);
  NewtonConfig cfg;
  const InnerFit fit = fit_at_tau(s, ChangePoint(100, 200), Family::Clayton, 2.0, std::nullopt, cfg);
  EXPECT_GE(fit.params.alpha0, cfg.clayton_alpha_min * (1 - 1e-12));
  EXPECT_GE(fit.params.alpha1, cfg.clayton_alpha_min * (1 - 1e-12));
}

TEST(ProfileFit, RequiresSevenObservations) {
  const Series s(std::vector<double>{1, 2, 1, 2, 1, 2});
  EXPECT_THROW(profile_fit(s, Family::Clayton, 2.0, NewtonConfig{}), DomainError);
}

TEST(ProfileFit, ProfileCoversRangeAndArgmaxIsConsistent) {
  const Series s = simulated(Family::Clayton, 2, 60, 30, 21);
  const FitResult fit = profile_fit(s, Family::Clayton, 2.0, NewtonConfig{});
  ASSERT_EQ(fit.profile.size(), 60u - 5u);
  EXPECT_EQ(fit.profile.front().tau, 3);
  EXPECT_EQ(fit.profile.back().tau, 57);
  double best = -INFINITY;
  int best_tau = 0;
  for (const auto& pt : fit.profile) {
    if (pt.loglik > best + 1e-9) {
      best = pt.loglik;
      best_tau = pt.tau;
    }
  }
  EXPECT_EQ(fit.cp.tau(), best_tau);
  EXPECT_DOUBLE_EQ(fit.loglik, best);
  EXPECT_DOUBLE_EQ(fit.aic, 14 - 2 * fit.loglik);
  EXPECT_DOUBLE_EQ(likelihood::log_likelihood(s, fit.params, fit.cp), fit.loglik);
}

TEST(ProfileFit, HonoursTauRange) {
  const Series s = simulated(Family::Clayton, 2, 60, 30, 21);
  NewtonConfig cfg;
  cfg.tau_min = 20;
  cfg.tau_max = 40;
  const FitResult fit = profile_fit(s, Family::Clayton, 2.0, cfg);
  ASSERT_EQ(fit.profile.size(), 21u);
  EXPECT_GE(fit.cp.tau(), 20);
  EXPECT_LE(fit.cp.tau(), 40);
}

TEST(ProfileFit, RecoversSharpChange) {
  // Scale jumps from 1.2 to 6, so the break is unambiguous.
  for (Family f : {Family::Clayton, Family::Joe}) {
    const Series s = simulated(f, 2, 100, 50, 4, 6.0);
    const FitResult fit = profile_fit(s, f, 2.0, NewtonConfig{});
    EXPECT_EQ(fit.cp.tau(), 50) << copula::to_string(f);
    EXPECT_TRUE(fit.converged);
  }
}

TEST(ProfileFit, ColdStartsAreWorkerIndependent) {
  const Series s = simulated(Family::Joe, 2, 50, 25, 8);
  NewtonConfig cfg;
  cfg.warm_start = false;
  cfg.workers = 1;
  const FitResult one = profile_fit(s, Family::Joe, 2.0, cfg);
  cfg.workers = 4;
  const FitResult four = profile_fit(s, Family::Joe, 2.0, cfg);
  ASSERT_EQ(one.profile.size(), four.profile.size());
  for (std::size_t i = 0; i < one.profile.size(); ++i) {
    EXPECT_EQ(one.profile[i].loglik, four.profile[i].loglik);
  }
  EXPECT_EQ(one.cp, four.cp);
}

TEST(ProfileFit, ScaleEquivariance) {
  const Series s = simulated(Family::Clayton, 2, 80, 40, 17);
  std::vector<double> scaled(s.values().begin(), s.values().end());
  for (double& x : scaled) x *= 3.7;
  const FitResult a = profile_fit(s, Family::Clayton, 2.0, NewtonConfig{});
  const FitResult b = profile_fit(Series(scaled), Family::Clayton, 2.0, NewtonConfig{});
  EXPECT_EQ(a.cp, b.cp);
  EXPECT_NEAR(b.params.gamma0.shape() / a.params.gamma0.shape(), 1.0, 1e-6);
  EXPECT_NEAR(b.params.gamma1.shape() / a.params.gamma1.shape(), 1.0, 1e-6);
  EXPECT_NEAR(b.params.gamma0.scale() / a.params.gamma0.scale(), 3.7, 3.7e-6);
  EXPECT_NEAR(b.params.gamma1.scale() / a.params.gamma1.scale(), 3.7, 3.7e-6);
  EXPECT_NEAR(b.params.alpha0 / a.params.alpha0, 1.0, 1e-6);
  EXPECT_NEAR(b.params.alpha1 / a.params.alpha1, 1.0, 1e-6);
}
