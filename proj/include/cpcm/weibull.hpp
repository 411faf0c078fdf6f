#pragma once

namespace cpcm::weibull {

/// Two-parameter Weibull marginal: shape k, scale lambda.
class WeibullParams {
 public:
  /// Throws DomainError unless both parameters are finite and positive.
  WeibullParams(double shape, double scale);

  double shape() const noexcept { return k_; }
  double scale() const noexcept { return lambda_; }

  friend bool operator==(const WeibullParams&, const WeibullParams&) = default;

 private:
  double k_;
  double lambda_;
};

struct Moments {
  double mean;
  double variance;
};

/// First and second partial derivatives with respect to (k, lambda).
struct Partials {
  double dk = 0.0;
  double dlambda = 0.0;
  double dkk = 0.0;
  double dklambda = 0.0;
  double dlambdalambda = 0.0;
};

double cdf(double x, const WeibullParams& p);
double pdf(double x, const WeibullParams& p);
double log_pdf(double x, const WeibullParams& p);
double quantile(double u, const WeibullParams& p);
Moments moments(const WeibullParams& p);

Partials cdf_partials(double x, const WeibullParams& p);
Partials pdf_partials(double x, const WeibullParams& p);
/// Partials of log_pdf; this is what the likelihood consumes.
Partials log_pdf_partials(double x, const WeibullParams& p);

/// Everything the likelihood needs from one observation in a single pass:
/// log-density, CDF, and their (k, lambda) partials.
struct ObservationTerms {
  double log_pdf;
  double cdf;
  double survival;  ///< 1 - cdf without cancellation
  Partials log_pdf_partials;
  Partials cdf_partials;
};

ObservationTerms observation_terms(double x, const WeibullParams& p, bool with_partials);

/// Shape and scale matching a sample mean and coefficient of variation.
/// Returns k = 1, lambda = mean when cv is zero or not finite.
WeibullParams match_moments(double mean, double cv);

}  // namespace cpcm::weibull
