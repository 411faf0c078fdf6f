#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cpcm/error.hpp"
#include "cpcm/likelihood.hpp"

using namespace cpcm;
using copula::Family;
using weibull::WeibullParams;

namespace {

const std::vector<double> kFixture{0.5, 1.1, 0.9, 1.4, 2.0, 1.7};

ModelParams params(Family f, double a0, double a1, double a01) {
  return {WeibullParams(1.8, 1.2), WeibullParams(2.1, 1.5), a0, a1, a01, f};
}

// Central differences of the transformed log-likelihood and of its gradient.
Vector6 fd_gradient(const Series& s, const TransformedParams& tp, ChangePoint cp, Family f,
                    double a01, double h) {
  Vector6 g;
  const Vector6 x = tp.as_vector();
  for (int i = 0; i < 6; ++i) {
    Vector6 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (likelihood::evaluate(s, TransformedParams::from_vector(xp), cp, f, a01,
                                 likelihood::Order::Value).value -
            likelihood::evaluate(s, TransformedParams::from_vector(xm), cp, f, a01,
                                 likelihood::Order::Value).value) /
           (2 * h);
  }
  return g;
}

Matrix6 fd_hessian(const Series& s, const TransformedParams& tp, ChangePoint cp, Family f,
                   double a01, double h) {
  Matrix6 m;
  const Vector6 x = tp.as_vector();
  for (int i = 0; i < 6; ++i) {
    Vector6 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    m.col(i) = (likelihood::gradient(s, TransformedParams::from_vector(xp), cp, f, a01) -
                likelihood::gradient(s, TransformedParams::from_vector(xm), cp, f, a01)) /
               (2 * h);
  }
  return m;
}

double max_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return ((a - b).array().abs() / (1.0 + b.array().abs())).maxCoeff();
}

}  // namespace

TEST(Series, Validation) {
  EXPECT_THROW(Series({1.0, 0.0, 2.0}), ObservationError);
  try {
    Series({1.0, 2.0, -3.0});
    FAIL();
  } catch (const ObservationError& e) {
    EXPECT_EQ(e.index(), 3u);
  }
  EXPECT_THROW(Series({1.0, NAN}), ObservationError);
  EXPECT_THROW(Series({1.0, 2.0}, {"a"}), DomainError);
}

TEST(ChangePoint, Range) {
  EXPECT_NO_THROW(ChangePoint(3, 6));
  EXPECT_THROW(ChangePoint(2, 10), DomainError);
  EXPECT_THROW(ChangePoint(8, 10), DomainError);
  EXPECT_NO_THROW(ChangePoint(7, 10));
}

TEST(Likelihood, FixtureMatchesHighPrecisionOracle) {
  const Series s(kFixture);
  // tests/oracles/reference_values.py: every term evaluated independently at 40 digits
  EXPECT_NEAR(likelihood::log_likelihood(s, params(Family::Clayton, 2, 2, 2), ChangePoint(3, 6)),
              -3.528717676885641697, 1e-10);
  EXPECT_NEAR(likelihood::log_likelihood(s, params(Family::Joe, 2, 3, 1.5), ChangePoint(3, 6)),
              -3.5922786741772804673, 1e-10);
}

TEST(Likelihood, SevenPointOracle) {
  const Series s({0.5, 1.1, 0.9, 1.4, 2.0, 1.7, 1.2});
  const ModelParams p = params(Family::Clayton, 0.5, 4, 2);
  EXPECT_NEAR(likelihood::log_likelihood(s, p, ChangePoint(4, 7)), -3.7578999586034354544, 1e-10);
}

TEST(Likelihood, JoeIndependenceIsMarginalOnly) {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> xs(40);
  for (auto& x : xs) x = ex(rng) + 0.01;
  const Series s(xs);
  const ModelParams p = params(Family::Joe, 1, 1, 1);
  const ChangePoint cp(17, xs.size());
  double marginal = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    marginal += weibull::log_pdf(xs[i], i < 17 ? p.gamma0 : p.gamma1);
  }
  EXPECT_EQ(likelihood::log_likelihood(s, p, cp), marginal);
  EXPECT_EQ(likelihood::decompose(s, p, cp).copula, 0.0);
}

TEST(Likelihood, DecompositionAddsUp) {
  const Series s(kFixture);
  const ModelParams p = params(Family::Clayton, 2, 2, 2);
  const auto d = likelihood::decompose(s, p, ChangePoint(3, 6));
  EXPECT_DOUBLE_EQ(d.total(), likelihood::log_likelihood(s, p, ChangePoint(3, 6)));
}

TEST(Likelihood, LabelsDoNotMatter) {
  const Series a(kFixture);
  const Series b(kFixture, {"x", "y", "z", "w", "v", "u"});
  const ModelParams p = params(Family::Joe, 2, 3, 2);
  EXPECT_EQ(likelihood::log_likelihood(a, p, ChangePoint(3, 6)),
            likelihood::log_likelihood(b, p, ChangePoint(3, 6)));
}

TEST(Likelihood, TransformRoundTrip) {
  for (Family f : {Family::Clayton, Family::Joe}) {
    const ModelParams p = params(f, 2, 2, 2);
    const TransformedParams tp = likelihood::transform(p);
    const ModelParams q = likelihood::untransform(tp, f, 2);
    EXPECT_NEAR(q.gamma0.shape(), 1.8, 1.8e-14);
    EXPECT_NEAR(q.gamma1.shape(), 2.1, 2.1e-14);
    EXPECT_NEAR(q.gamma0.scale(), 1.2, 1.2e-14);
    EXPECT_NEAR(q.gamma1.scale(), 1.5, 1.5e-14);
    EXPECT_NEAR(q.alpha0, 2.0, 2e-14);
    EXPECT_NEAR(q.alpha1, 2.0, 2e-14);
  }
  const TransformedParams tp = likelihood::transform(params(Family::Clayton, 2, 2, 2));
  EXPECT_NEAR(tp.a0, std::log(3.0), 1e-15);
  EXPECT_EQ(likelihood::transform(
                {WeibullParams(1.0, 1.0), WeibullParams(1.0, 1.0), 2, 2, 2, Family::Clayton})
                .k0,
            0.0);
  EXPECT_THROW(likelihood::transform(params(Family::Joe, 1.0, 2.0, 2.0)), DomainError);
}

TEST(Likelihood, FixtureDerivativesMatchFiniteDifferences) {
  const Series s(kFixture);
  for (Family f : {Family::Clayton, Family::Joe}) {
    const ModelParams p = params(f, 2, 3, 2);
    const TransformedParams tp = likelihood::transform(p);
    const ChangePoint cp(3, 6);
    const auto e = likelihood::evaluate(s, tp, cp, f, 2, likelihood::Order::Hessian);
    EXPECT_LT(max_rel_error(e.gradient, fd_gradient(s, tp, cp, f, 2, 1e-6)), 1e-5);
    EXPECT_LT(max_rel_error(e.hessian, fd_hessian(s, tp, cp, f, 2, 1e-4)), 1e-4);
    EXPECT_LT((e.hessian - e.hessian.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Likelihood, RandomInteriorDerivatives) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lk(std::log(0.7), std::log(4.0));
  std::uniform_real_distribution<double> ll(std::log(0.5), std::log(3.0));
  std::uniform_real_distribution<double> la(std::log(0.3), std::log(10.0));
  std::exponential_distribution<double> ex(1.0);
  for (Family f : {Family::Clayton, Family::Joe}) {
    for (int i = 0; i < 40; ++i) {
      std::vector<double> xs(20);
      for (auto& x : xs) x = 0.05 + 1.5 * ex(rng);
      const Series s(xs);
      const double base = f == Family::Clayton ? 0.0 : 1.0;
      const ModelParams p{WeibullParams(std::exp(lk(rng)), std::exp(ll(rng))),
                          WeibullParams(std::exp(lk(rng)), std::exp(ll(rng))),
                          base + std::exp(la(rng)), base + std::exp(la(rng)),
                          base + std::exp(la(rng)), f};
      const ChangePoint cp(3 + i % 14, xs.size());
      const TransformedParams tp = likelihood::transform(p);
      const auto e = likelihood::evaluate(s, tp, cp, f, p.alpha01, likelihood::Order::Hessian);
      EXPECT_LT(max_rel_error(e.gradient, fd_gradient(s, tp, cp, f, p.alpha01, 1e-6)), 1e-5);
      EXPECT_LT(max_rel_error(e.hessian, fd_hessian(s, tp, cp, f, p.alpha01, 1e-4)), 1e-4);
    }
  }
}

TEST(Likelihood, CrossRegimeBlocksComeFromJunctionOnly) {
  const Series s(kFixture);
  // Joe with alpha01 = 1: the junction pair contributes nothing, so every
  // cross-regime entry vanishes.
  const ModelParams p = params(Family::Joe, 2, 3, 1);
  const Matrix6 h =
      likelihood::hessian(s, likelihood::transform(p), ChangePoint(3, 6), Family::Joe, 1);
  for (int r0 : {kK0, kLambda0, kA0}) {
    for (int r1 : {kK1, kLambda1, kA1}) {
      EXPECT_EQ(h(r0, r1), 0.0);
    }
  }
  const Matrix6 hj = likelihood::hessian(s, likelihood::transform(params(Family::Joe, 2, 3, 2)),
                                         ChangePoint(3, 6), Family::Joe, 2);
  EXPECT_NE(hj(kK0, kK1), 0.0);
  EXPECT_EQ(hj(kA0, kA1), 0.0);
}

TEST(Likelihood, NearIndependenceScoreIsWeibullScore) {
  const Series s(kFixture);
  const ModelParams p = params(Family::Clayton, 1e-8, 1e-8, 1e-8);
  const auto e = likelihood::evaluate_natural(s, p, ChangePoint(3, 6), likelihood::Order::Gradient);
  double g_k0 = 0.0, g_l1 = 0.0;
  for (std::size_t i = 0; i < kFixture.size(); ++i) {
    const auto d = weibull::log_pdf_partials(kFixture[i], i < 3 ? p.gamma0 : p.gamma1);
    if (i < 3) g_k0 += d.dk;
    if (i >= 3) g_l1 += d.dlambda;
  }
  EXPECT_NEAR(e.gradient[kK0], g_k0, 1e-6);
  EXPECT_NEAR(e.gradient[kLambda1], g_l1, 1e-6);
}

TEST(Likelihood, ErrorsCarryObservationIndex) {
  // negative Clayton dependence outside the support at the pair (2, 3)
  const Series s({3.0, 0.05, 0.05, 1.0, 1.0, 1.0, 1.0});
  const ModelParams p{WeibullParams(1, 1), WeibullParams(1, 1), -0.9, 2, 2, Family::Clayton};
  try {
    likelihood::log_likelihood(s, p, ChangePoint(4, 7));
    FAIL();
  } catch (const ObservationError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}
