#include "cpcm/weibull.hpp"

#include <cmath>
#include <string>

#include "cpcm/error.hpp"

namespace cpcm::weibull {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string("weibull: ") + what + " must be finite and > 0, got " +
                      std::to_string(x));
  }
}

// Shared pieces for a positive observation: log(x/lambda) and (x/lambda)^k.
struct Reduced {
  double log_ratio;
  double z;
};

Reduced reduce(double x, const WeibullParams& p) {
  require_positive(x, "x");
  const double log_ratio = std::log(x) - std::log(p.scale());
  return {log_ratio, std::exp(p.shape() * log_ratio)};
}

}  // namespace

WeibullParams::WeibullParams(double shape, double scale) : k_(shape), lambda_(scale) {
  require_positive(shape, "shape k");
  require_positive(scale, "scale lambda");
}

double cdf(double x, const WeibullParams& p) {
  if (!(x >= 0.0) || std::isnan(x)) {
    throw DomainError("weibull: cdf requires x >= 0, got " + std::to_string(x));
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return -std::expm1(-std::pow(x / p.scale(), p.shape()));
}

double log_pdf(double x, const WeibullParams& p) {
  const auto [log_ratio, z] = reduce(x, p);
  const double k = p.shape();
  return std::log(k) - std::log(p.scale()) + (k - 1.0) * log_ratio - z;
}

double pdf(double x, const WeibullParams& p) { return std::exp(log_pdf(x, p)); }

double quantile(double u, const WeibullParams& p) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("weibull: quantile requires 0 < u < 1, got " + std::to_string(u));
  }
  return p.scale() * std::pow(-std::log1p(-u), 1.0 / p.shape());
}

Moments moments(const WeibullParams& p) {
  const double k = p.shape();
  const double lambda = p.scale();
  const double g1 = std::exp(std::lgamma(1.0 + 1.0 / k));
  const double g2 = std::exp(std::lgamma(1.0 + 2.0 / k));
  const double variance = lambda * lambda * (g2 - g1 * g1);
  return {lambda * g1, variance < 0.0 ? 0.0 : variance};
}

Partials cdf_partials(double x, const WeibullParams& p) {
  return observation_terms(x, p, true).cdf_partials;
}

Partials log_pdf_partials(double x, const WeibullParams& p) {
  return observation_terms(x, p, true).log_pdf_partials;
}

Partials pdf_partials(double x, const WeibullParams& p) {
  const double density = pdf(x, p);
  const Partials g = log_pdf_partials(x, p);
  return {density * g.dk, density * g.dlambda, density * (g.dkk + g.dk * g.dk),
          density * (g.dklambda + g.dk * g.dlambda),
          density * (g.dlambdalambda + g.dlambda * g.dlambda)};
}

ObservationTerms observation_terms(double x, const WeibullParams& p, bool with_partials) {
  const auto [log_ratio, z] = reduce(x, p);
  const double k = p.shape();
  const double lambda = p.scale();

  ObservationTerms out{};
  out.log_pdf = std::log(k) - std::log(lambda) + (k - 1.0) * log_ratio - z;
  out.cdf = -std::expm1(-z);
  out.survival = std::exp(-z);
  if (!with_partials) return out;

  const double l2 = lambda * lambda;
  Partials& g = out.log_pdf_partials;
  g.dk = 1.0 / k + log_ratio - z * log_ratio;
  g.dlambda = (k / lambda) * (z - 1.0);
  g.dkk = -1.0 / (k * k) - z * log_ratio * log_ratio;
  g.dklambda = (z - 1.0 + k * z * log_ratio) / lambda;
  g.dlambdalambda = -(k / l2) * (z - 1.0) - (k * k / l2) * z;

  // With H = 1 - exp(-z):  dH = exp(-z) dz,  d2H = exp(-z) (d2z - dz dz').
  // z_k = z L, z_l = -(k/l) z, z_kk = z L^2, z_kl = -(z/l)(kL + 1), z_ll = k(k+1) z / l^2.
  const double survival = out.survival;
  const double z_k = z * log_ratio;
  const double z_l = -(k / lambda) * z;
  Partials& h = out.cdf_partials;
  h.dk = survival * z_k;
  h.dlambda = survival * z_l;
  h.dkk = survival * (z * log_ratio * log_ratio - z_k * z_k);
  h.dklambda = survival * (-(z / lambda) * (k * log_ratio + 1.0) - z_k * z_l);
  h.dlambdalambda = survival * (k * (k + 1.0) * z / l2 - z_l * z_l);
  return out;
}

WeibullParams match_moments(double mean, double cv) {
  require_positive(mean, "mean");
  if (!(cv > 0.0) || !std::isfinite(cv)) return {1.0, mean};

  // log(1 + cv^2) = lgamma(1 + 2/k) - 2 lgamma(1 + 1/k), decreasing in k.
  const double target = std::log1p(cv * cv);
  const auto gap = [target](double log_k) {
    const double k = std::exp(log_k);
    return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k) - target;
  };
  double lo = std::log(1e-2);
  double hi = std::log(1e2);
  if (gap(lo) <= 0.0) {
    hi = lo;
  } else if (gap(hi) >= 0.0) {
    lo = hi;
  } else {
    for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  const double k = std::exp(0.5 * (lo + hi));
  return {k, mean / std::exp(std::lgamma(1.0 + 1.0 / k))};
}

}  // namespace cpcm::weibull
