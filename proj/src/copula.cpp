#include "cpcm/copula.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "cpcm/error.hpp"

namespace cpcm::copula {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_unit(double u) { return std::clamp(u, kClamp, 1.0 - kClamp); }

// Clamps u and its complement together.
void clamp_pair(double& u, double& ubar) {
  if (u < kClamp) {
    u = kClamp;
    ubar = 1.0 - kClamp;
  } else if (ubar < kClamp) {
    u = 1.0 - kClamp;
    ubar = kClamp;
  }
}

void require_unit(double u, const char* name) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(std::string("copula: ") + name + " must lie in [0,1], got " +
                      std::to_string(u));
  }
}

bool near_independence(const CopulaSpec& spec) {
  return spec.family() == Family::Clayton && std::abs(spec.alpha()) < kIndependenceBand;
}

// log(e^la + e^lb - 1) for the Clayton sum S = u^-a + v^-a - 1.
// Returns NaN when S <= 0 (only reachable with negative alpha).
double clayton_log_sum(double la, double lb) {
  const double m = std::max({la, lb, 0.0});
  if (m < 1.0) {
    const double s_minus_one = std::expm1(la) + std::expm1(lb);
    return s_minus_one > -1.0 ? std::log1p(s_minus_one)
                              : std::numeric_limits<double>::quiet_NaN();
  }
  const double scaled = std::exp(la - m) + std::exp(lb - m) - std::exp(-m);
  return scaled > 0.0 ? m + std::log(scaled) : std::numeric_limits<double>::quiet_NaN();
}

// log J for the Joe sum J = x + y - xy with x = e^lx, y = e^ly (both <= 1).
double joe_log_sum(double lx, double ly) {
  if (lx < ly) std::swap(lx, ly);
  if (lx == -kInf) return -kInf;
  // J = x (1 + (y/x)(1 - x))
  return lx + std::log1p(std::exp(ly - lx) * -std::expm1(lx));
}

LogDensityPartials clayton_partials(double u, double v, double alpha) {
  const double lu = std::log(u);
  const double lv = std::log(v);
  LogDensityPartials d;

  if (std::abs(alpha) < kIndependenceBand) {
    // Second-order expansion about the independence copula:
    // log c = a (1+lu)(1+lv) + a^2 (lu^2 lv + lu lv^2 + 4 lu lv - 1) / 2.
    const double c1 = (1.0 + lu) * (1.0 + lv);
    const double c2 = 0.5 * (lu * lu * lv + lu * lv * lv + 4.0 * lu * lv - 1.0);
    const double c2u = (2.0 * lu * lv + lv * lv + 4.0 * lv) / (2.0 * u);
    const double c2v = (2.0 * lu * lv + lu * lu + 4.0 * lu) / (2.0 * v);
    const double a2 = alpha * alpha;
    d.value = alpha * c1 + a2 * c2;
    d.du = alpha * (1.0 + lv) / u + a2 * c2u;
    d.dv = alpha * (1.0 + lu) / v + a2 * c2v;
    d.da = c1 + 2.0 * alpha * c2;
    d.daa = 2.0 * c2;
    d.duu = -alpha * (1.0 + lv) / (u * u) - a2 * (2.0 * lv + 2.0 * lu * lv + lv * lv) / (2.0 * u * u);
    d.dvv = -alpha * (1.0 + lu) / (v * v) - a2 * (2.0 * lu + 2.0 * lu * lv + lu * lu) / (2.0 * v * v);
    d.duv = alpha / (u * v) + a2 * (lu + lv + 2.0) / (u * v);
    d.dua = (1.0 + lv) / u + 2.0 * alpha * c2u;
    d.dva = (1.0 + lu) / v + 2.0 * alpha * c2v;
    return d;
  }

  const double log_s = clayton_log_sum(-alpha * lu, -alpha * lv);
  if (std::isnan(log_s)) {
    throw IndicatorViolation("clayton: u^-a + v^-a - 1 <= 0 outside the support for alpha=" +
                             std::to_string(alpha));
  }
  // p = u^-a / S, q = v^-a / S
  const double p = std::exp(-alpha * lu - log_s);
  const double q = std::exp(-alpha * lv - log_s);
  const double g = 1.0 / alpha + 2.0;
  const double a1 = 1.0 + alpha;

  // Derivatives of log S.
  const double s_u = -alpha * p / u;
  const double s_v = -alpha * q / v;
  const double s_a = -(p * lu + q * lv);
  const double s_uu = alpha * a1 * p / (u * u) - s_u * s_u;
  const double s_vv = alpha * a1 * q / (v * v) - s_v * s_v;
  const double s_uv = -s_u * s_v;
  const double s_ua = (p / u) * (alpha * lu - 1.0) - s_u * s_a;
  const double s_va = (q / v) * (alpha * lv - 1.0) - s_v * s_a;
  const double s_aa = p * lu * lu + q * lv * lv - s_a * s_a;

  const double inv_a2 = 1.0 / (alpha * alpha);
  d.value = std::log1p(alpha) - a1 * (lu + lv) - g * log_s;
  d.du = -a1 / u - g * s_u;
  d.dv = -a1 / v - g * s_v;
  d.da = 1.0 / a1 - lu - lv + log_s * inv_a2 - g * s_a;
  d.duu = a1 / (u * u) - g * s_uu;
  d.dvv = a1 / (v * v) - g * s_vv;
  d.duv = -g * s_uv;
  d.dua = -1.0 / u + inv_a2 * s_u - g * s_ua;
  d.dva = -1.0 / v + inv_a2 * s_v - g * s_va;
  d.daa = -1.0 / (a1 * a1) - 2.0 * log_s * inv_a2 / alpha + 2.0 * inv_a2 * s_a - g * s_aa;
  return d;
}

LogDensityPartials joe_partials(double ub, double vb, double alpha) {
  LogDensityPartials d;
  const double lub = std::log(ub);
  const double lvb = std::log(vb);
  const double lx = alpha * lub;
  const double ly = alpha * lvb;
  const double x = std::exp(lx);
  const double y = std::exp(ly);
  const double log_j = joe_log_sum(lx, ly);
  const double j = std::exp(log_j);
  const double px = std::exp(lx - log_j);
  const double py = std::exp(ly - log_j);
  const double pxy = std::exp(lx + ly - log_j);
  const double m = alpha - 1.0 + j;
  const double r = j / m;

  // Derivatives of J divided by J.
  const double ju = -alpha * px * (1.0 - y) / ub;
  const double jv = -alpha * py * (1.0 - x) / vb;
  const double juu = alpha * (alpha - 1.0) * px * (1.0 - y) / (ub * ub);
  const double jvv = alpha * (alpha - 1.0) * py * (1.0 - x) / (vb * vb);
  const double juv = -alpha * alpha * pxy / (ub * vb);
  const double ja = lub * px * (1.0 - y) + lvb * py * (1.0 - x);
  const double jaa = lub * lub * px * (1.0 - y) - 2.0 * lub * lvb * pxy + lvb * lvb * py * (1.0 - x);
  const double jua = -(px / ub) * (1.0 + alpha * lub) * (1.0 - y) + alpha * pxy * lvb / ub;
  const double jva = -(py / vb) * (1.0 + alpha * lvb) * (1.0 - x) + alpha * pxy * lub / vb;

  const double f = 1.0 / alpha - 2.0;
  const double f1 = -1.0 / (alpha * alpha);
  const double f2 = 2.0 / (alpha * alpha * alpha);
  const double am1 = alpha - 1.0;
  const double ma = 1.0 / m + ja * r;  // (1 + J_a) / M

  d.value = f * log_j + am1 * (lub + lvb) + std::log(m);
  d.du = f * ju - am1 / ub + ju * r;
  d.dv = f * jv - am1 / vb + jv * r;
  d.da = f1 * log_j + f * ja + lub + lvb + ma;
  d.duu = f * (juu - ju * ju) - am1 / (ub * ub) + juu * r - (ju * r) * (ju * r);
  d.dvv = f * (jvv - jv * jv) - am1 / (vb * vb) + jvv * r - (jv * r) * (jv * r);
  d.duv = f * (juv - ju * jv) + juv * r - (ju * r) * (jv * r);
  d.dua = f1 * ju + f * (jua - ju * ja) - 1.0 / ub + jua * r - (ju * r) * ma;
  d.dva = f1 * jv + f * (jva - jv * ja) - 1.0 / vb + jva * r - (jv * r) * ma;
  d.daa = f2 * log_j + 2.0 * f1 * ja + f * (jaa - ja * ja) + jaa * r - ma * ma;
  if (alpha == 1.0) {
    // Independence: the density is identically 1 in (u, v); only the alpha
    // direction carries information.
    d.value = d.du = d.dv = d.duu = d.dvv = d.duv = 0.0;
  }
  return d;
}

double clayton_h(double v, double u, double alpha) {
  if (std::abs(alpha) < kIndependenceBand) return v;
  const double lu = std::log(u);
  const double log_s = clayton_log_sum(-alpha * lu, -alpha * std::log(v));
  if (std::isnan(log_s)) return 0.0;  // C vanishes there, so does dC/du
  return std::min(1.0, std::exp(-(alpha + 1.0) * lu - (1.0 / alpha + 1.0) * log_s));
}

double joe_h(double v, double u, double alpha) {
  const double lub = std::log1p(-u);
  const double ly = alpha * std::log1p(-v);
  const double log_j = joe_log_sum(alpha * lub, ly);
  const double log_h =
      (1.0 / alpha - 1.0) * log_j + (alpha - 1.0) * lub + std::log(-std::expm1(ly));
  return std::min(1.0, std::exp(log_h));
}

double clayton_h_inverse(double w, double u, double alpha) {
  if (std::abs(alpha) < kIndependenceBand) return w;
  const double lu = std::log(u);
  // v = [(w^{-a/(1+a)} - 1) u^{-a} + 1]^{-1/a}
  const double e1 = std::expm1(-alpha / (1.0 + alpha) * std::log(w));
  double log_b;
  if (alpha > 0.0) {
    const double lt = std::log(e1) - alpha * lu;
    log_b = lt > 0.0 ? lt + std::log1p(std::exp(-lt)) : std::log1p(std::exp(lt));
  } else {
    log_b = std::log1p(e1 * std::exp(-alpha * lu));
  }
  return std::exp(-log_b / alpha);
}

double joe_h_inverse(double w, double u, double alpha, int max_iterations) {
  if (alpha == 1.0) return w;
  double lo = 1e-14;
  double hi = 1.0 - 1e-14;
  double h_lo = joe_h(lo, u, alpha);
  double h_hi = joe_h(hi, u, alpha);
  if (w <= h_lo) return lo;
  if (w >= h_hi) return hi;
  for (int i = 0; i < max_iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      return (w - h_lo) <= (h_hi - w) ? lo : hi;
    }
    const double h_mid = joe_h(mid, u, alpha);
    if (std::abs(h_mid - w) <= 1e-12) return mid;
    if (h_mid < w) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
      h_hi = h_mid;
    }
  }
  throw ConvergenceFailure("joe h_inverse: bisection exceeded " + std::to_string(max_iterations) +
                           " iterations (w=" + std::to_string(w) + ", u=" + std::to_string(u) +
                           ")");
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  return family == Family::Clayton ? "clayton" : "joe";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "clayton") return Family::Clayton;
  if (lower == "joe") return Family::Joe;
  return std::nullopt;
}

CopulaSpec::CopulaSpec(Family family, double alpha) : family_(family), alpha_(alpha) {
  if (!std::isfinite(alpha)) throw DomainError("copula: alpha must be finite");
  if (family == Family::Clayton && !(alpha > -1.0)) {
    throw DomainError("clayton: alpha must exceed -1, got " + std::to_string(alpha));
  }
  if (family == Family::Joe && !(alpha >= 1.0)) {
    throw DomainError("joe: alpha must be >= 1, got " + std::to_string(alpha));
  }
}

double cdf(double u, double v, const CopulaSpec& spec) {
  require_unit(u, "u");
  require_unit(v, "v");
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double a = spec.alpha();
  if (spec.family() == Family::Clayton) {
    if (near_independence(spec)) return u * v;
    const double log_s = clayton_log_sum(-a * std::log(u), -a * std::log(v));
    if (std::isnan(log_s)) return 0.0;
    return std::clamp(std::exp(-log_s / a), 0.0, 1.0);
  }
  const double log_j = joe_log_sum(a * std::log1p(-u), a * std::log1p(-v));
  return std::clamp(-std::expm1(log_j / a), 0.0, 1.0);
}

LogDensityPartials log_density_partials(double u, double v, const CopulaSpec& spec) {
  return log_density_partials(u, 1.0 - u, v, 1.0 - v, spec);
}

LogDensityPartials log_density_partials(double u, double ubar, double v, double vbar,
                                        const CopulaSpec& spec) {
  require_unit(u, "u");
  require_unit(v, "v");
  clamp_pair(u, ubar);
  clamp_pair(v, vbar);
  return spec.family() == Family::Clayton ? clayton_partials(u, v, spec.alpha())
                                          : joe_partials(ubar, vbar, spec.alpha());
}

double log_density(double u, double v, const CopulaSpec& spec) {
  return log_density(u, 1.0 - u, v, 1.0 - v, spec);
}

double log_density(double u, double ubar, double v, double vbar, const CopulaSpec& spec) {
  require_unit(u, "u");
  require_unit(v, "v");
  clamp_pair(u, ubar);
  clamp_pair(v, vbar);
  const double a = spec.alpha();
  if (spec.family() == Family::Joe) {
    if (a == 1.0) return 0.0;
    const double lub = std::log(ubar);
    const double lvb = std::log(vbar);
    const double log_j = joe_log_sum(a * lub, a * lvb);
    return (1.0 / a - 2.0) * log_j + (a - 1.0) * (lub + lvb) + std::log(a - 1.0 + std::exp(log_j));
  }
  if (near_independence(spec)) return clayton_partials(u, v, a).value;
  const double lu = std::log(u);
  const double lv = std::log(v);
  const double log_s = clayton_log_sum(-a * lu, -a * lv);
  if (std::isnan(log_s)) {
    throw IndicatorViolation("clayton: u^-a + v^-a - 1 <= 0 outside the support for alpha=" +
                             std::to_string(a));
  }
  return std::log1p(a) - (1.0 + a) * (lu + lv) - (1.0 / a + 2.0) * log_s;
}

double density(double u, double v, const CopulaSpec& spec) {
  try {
    return std::exp(log_density(u, v, spec));
  } catch (const IndicatorViolation&) {
    return 0.0;
  }
}

double h_function(double v, double u, const CopulaSpec& spec) {
  require_unit(u, "u");
  require_unit(v, "v");
  if (v == 0.0) return 0.0;
  if (v == 1.0) return 1.0;
  u = clamp_unit(u);
  v = clamp_unit(v);
  return spec.family() == Family::Clayton ? clayton_h(v, u, spec.alpha())
                                          : joe_h(v, u, spec.alpha());
}

double h_inverse(double w, double u, const CopulaSpec& spec, int max_iterations) {
  require_unit(w, "w");
  require_unit(u, "u");
  if (w == 0.0) return 0.0;
  if (w == 1.0) return 1.0;
  u = clamp_unit(u);
  if (spec.family() == Family::Clayton) {
    return std::clamp(clayton_h_inverse(w, u, spec.alpha()), 0.0, 1.0);
  }
  return joe_h_inverse(w, u, spec.alpha(), max_iterations);
}

double kendall_tau(const CopulaSpec& spec) {
  const double a = spec.alpha();
  if (spec.family() == Family::Clayton) return a / (a + 2.0);
  if (a == 1.0) return 0.0;

  // tau = 1 + 4 * int_0^1 phi(t) / phi'(t) dt, phi(t) = -log(1 - (1-t)^a).
  // With s = (1-t)^a the integrand is (1-t)(1-s) log(1-s) / (a s).
  const auto integrand = [a](double t) {
    const double one_minus_t = 1.0 - t;
    if (one_minus_t <= 0.0) return 0.0;
    const double s = std::pow(one_minus_t, a);
    if (s <= 0.0) return -one_minus_t / a;
    if (s >= 1.0) return 0.0;
    return one_minus_t * (1.0 - s) * (std::log1p(-s) / s) / a;
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 15, 1e-13);
  return 1.0 + 4.0 * integral;
}

}  // namespace cpcm::copula
