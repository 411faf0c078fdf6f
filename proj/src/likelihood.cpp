#include "cpcm/likelihood.hpp"

#include <cmath>
#include <utility>

#include "cpcm/error.hpp"

namespace cpcm {

using copula::CopulaSpec;
using copula::Family;
using weibull::WeibullParams;

Series::Series(std::vector<double> values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (!labels_.empty() && labels_.size() != values_.size()) {
    throw DomainError("series: " + std::to_string(labels_.size()) + " labels for " +
                      std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw ObservationError(i + 1, "observations must be finite and > 0, got " +
                                        std::to_string(values_[i]));
    }
  }
}

ChangePoint::ChangePoint(int tau, std::size_t series_length) : tau_(tau) {
  const auto length = static_cast<long long>(series_length);
  if (tau < 3 || tau > length - 3) {
    throw DomainError("change point tau=" + std::to_string(tau) + " outside {3,...," +
                      std::to_string(length - 3) + "}");
  }
}

void ModelParams::validate() const {
  CopulaSpec(family, alpha0);
  CopulaSpec(family, alpha1);
  CopulaSpec(family, alpha01);
}

Vector6 TransformedParams::as_vector() const {
  Vector6 v;
  v << k0, k1, lambda0, lambda1, a0, a1;
  return v;
}

TransformedParams TransformedParams::from_vector(const Vector6& v) {
  return {v[kK0], v[kK1], v[kLambda0], v[kLambda1], v[kA0], v[kA1]};
}

namespace likelihood {

namespace {

double alpha_to_a(double alpha, Family family) {
  if (family == Family::Clayton) return std::log1p(alpha);
  if (!(alpha > 1.0)) {
    throw DomainError("joe: transform requires alpha > 1, got " + std::to_string(alpha));
  }
  return std::log(alpha - 1.0);
}

double a_to_alpha(double a, Family family) {
  return family == Family::Clayton ? std::expm1(a) : std::exp(a) + 1.0;
}

// d alpha / dA; the second derivative equals the first for both maps.
double alpha_jacobian(double alpha, Family family) {
  return family == Family::Clayton ? alpha + 1.0 : alpha - 1.0;
}

// Per-observation quantities for the regime the observation belongs to.
struct Marginal {
  double log_pdf;
  double u;
  double ubar;
  weibull::Partials log_pdf_d;
  weibull::Partials u_d;
};

constexpr int kNoAlpha = -1;

// Marginal log-densities of both regimes plus the copula log-density of
// every consecutive pair; the junction pair (tau, tau+1) uses alpha01.
Evaluation accumulate(const Series& series, const ModelParams& params, ChangePoint cp,
                      Order order, Decomposition* blocks) {
  const std::size_t n = series.size();
  const auto tau = static_cast<std::size_t>(cp.tau());
  const bool derivs = order != Order::Value;
  const bool second = order == Order::Hessian;

  const CopulaSpec spec0(params.family, params.alpha0);
  const CopulaSpec spec1(params.family, params.alpha1);
  const CopulaSpec spec01(params.family, params.alpha01);

  Evaluation out;
  Vector6& g = out.gradient;
  Matrix6& h = out.hessian;
  double marginal_sum = 0.0;
  double copula_sum = 0.0;

  std::vector<Marginal> marg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int regime = i < tau ? 0 : 1;
    const WeibullParams& gamma = regime == 0 ? params.gamma0 : params.gamma1;
    weibull::ObservationTerms terms;
    try {
      terms = weibull::observation_terms(series[i], gamma, derivs);
    } catch (const DomainError& e) {
      throw ObservationError(i + 1, e.what());
    }
    Marginal& m = marg[i];
    m.log_pdf = terms.log_pdf;
    m.u = terms.cdf;
    m.ubar = terms.survival;
    marginal_sum += terms.log_pdf;
    if (!derivs) continue;

    m.log_pdf_d = terms.log_pdf_partials;
    // The copula clamps u; the clamp has zero derivative.
    if (terms.cdf >= copula::kClamp && terms.survival >= copula::kClamp) {
      m.u_d = terms.cdf_partials;
    }
    const int ik = kK0 + regime;
    const int il = kLambda0 + regime;
    g[ik] += m.log_pdf_d.dk;
    g[il] += m.log_pdf_d.dlambda;
    if (second) {
      h(ik, ik) += m.log_pdf_d.dkk;
      h(il, il) += m.log_pdf_d.dlambdalambda;
      h(ik, il) += m.log_pdf_d.dklambda;
      h(il, ik) += m.log_pdf_d.dklambda;
    }
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int ru = i < tau ? 0 : 1;
    const int rv = i + 1 < tau ? 0 : 1;
    const CopulaSpec& spec = ru == 0 ? (rv == 0 ? spec0 : spec01) : spec1;
    const int ia = ru == 0 ? (rv == 0 ? kA0 : kNoAlpha) : kA1;
    const Marginal& mu = marg[i];
    const Marginal& mv = marg[i + 1];

    copula::LogDensityPartials c;
    try {
      if (derivs) {
        c = copula::log_density_partials(mu.u, mu.ubar, mv.u, mv.ubar, spec);
      } else {
        c.value = copula::log_density(mu.u, mu.ubar, mv.u, mv.ubar, spec);
      }
    } catch (const DomainError& e) {
      throw ObservationError(i + 1, e.what());
    }
    copula_sum += c.value;
    if (!derivs) continue;

    // u depends on (k, lambda) of regime ru, v on those of regime rv.
    const int pu[2] = {kK0 + ru, kLambda0 + ru};
    const int pv[2] = {kK0 + rv, kLambda0 + rv};
    const double du[2] = {mu.u_d.dk, mu.u_d.dlambda};
    const double dv[2] = {mv.u_d.dk, mv.u_d.dlambda};
    const double duu[2][2] = {{mu.u_d.dkk, mu.u_d.dklambda}, {mu.u_d.dklambda, mu.u_d.dlambdalambda}};
    const double dvv[2][2] = {{mv.u_d.dkk, mv.u_d.dklambda}, {mv.u_d.dklambda, mv.u_d.dlambdalambda}};

    for (int a = 0; a < 2; ++a) {
      g[pu[a]] += c.du * du[a];
      g[pv[a]] += c.dv * dv[a];
    }
    if (ia != kNoAlpha) g[ia] += c.da;
    if (!second) continue;

    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        h(pu[a], pu[b]) += c.duu * du[a] * du[b] + c.du * duu[a][b];
        h(pv[a], pv[b]) += c.dvv * dv[a] * dv[b] + c.dv * dvv[a][b];
        const double cross = c.duv * du[a] * dv[b];
        h(pu[a], pv[b]) += cross;
        h(pv[b], pu[a]) += cross;
      }
      if (ia != kNoAlpha) {
        h(pu[a], ia) += c.dua * du[a];
        h(ia, pu[a]) += c.dua * du[a];
        h(pv[a], ia) += c.dva * dv[a];
        h(ia, pv[a]) += c.dva * dv[a];
      }
    }
    if (ia != kNoAlpha) h(ia, ia) += c.daa;
  }

  out.value = marginal_sum + copula_sum;
  if (!std::isfinite(out.value)) {
    throw DomainError("log-likelihood is not finite");
  }
  if (blocks != nullptr) *blocks = {marginal_sum, copula_sum};
  return out;
}

}  // namespace

TransformedParams transform(const ModelParams& params) {
  params.validate();
  return {std::log(params.gamma0.shape()),
          std::log(params.gamma1.shape()),
          std::log(params.gamma0.scale()),
          std::log(params.gamma1.scale()),
          alpha_to_a(params.alpha0, params.family),
          alpha_to_a(params.alpha1, params.family)};
}

ModelParams untransform(const TransformedParams& tp, Family family, double alpha01) {
  return {WeibullParams(std::exp(tp.k0), std::exp(tp.lambda0)),
          WeibullParams(std::exp(tp.k1), std::exp(tp.lambda1)),
          a_to_alpha(tp.a0, family),
          a_to_alpha(tp.a1, family),
          alpha01,
          family};
}

double log_likelihood(const Series& series, const ModelParams& params, ChangePoint cp) {
  params.validate();
  return accumulate(series, params, cp, Order::Value, nullptr).value;
}

Decomposition decompose(const Series& series, const ModelParams& params, ChangePoint cp) {
  params.validate();
  Decomposition blocks{};
  accumulate(series, params, cp, Order::Value, &blocks);
  return blocks;
}

Evaluation evaluate_natural(const Series& series, const ModelParams& params, ChangePoint cp,
                            Order order) {
  params.validate();
  return accumulate(series, params, cp, order, nullptr);
}

Evaluation evaluate(const Series& series, const TransformedParams& tp, ChangePoint cp,
                    Family family, double alpha01, Order order) {
  const ModelParams params = untransform(tp, family, alpha01);
  Evaluation e = evaluate_natural(series, params, cp, order);
  if (order == Order::Value) return e;

  // theta_i = exp(phi_i) (+/- 1 for alpha): d theta / d phi = d2 theta / d phi2 = j_i.
  Vector6 j;
  j << params.gamma0.shape(), params.gamma1.shape(), params.gamma0.scale(), params.gamma1.scale(),
      alpha_jacobian(params.alpha0, family), alpha_jacobian(params.alpha1, family);

  if (order == Order::Hessian) {
    e.hessian = (j.asDiagonal() * e.hessian * j.asDiagonal()).eval();
    e.hessian.diagonal() += j.cwiseProduct(e.gradient);
  }
  e.gradient = j.cwiseProduct(e.gradient);
  return e;
}

Vector6 gradient(const Series& series, const TransformedParams& tp, ChangePoint cp,
                 Family family, double alpha01) {
  return evaluate(series, tp, cp, family, alpha01, Order::Gradient).gradient;
}

Matrix6 hessian(const Series& series, const TransformedParams& tp, ChangePoint cp, Family family,
                double alpha01) {
  return evaluate(series, tp, cp, family, alpha01, Order::Hessian).hessian;
}

}  // namespace likelihood
}  // namespace cpcm
