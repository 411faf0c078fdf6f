#pragma once

#include <optional>
#include <vector>

#include "cpcm/likelihood.hpp"

namespace cpcm {

struct NewtonConfig {
  double epsilon = 1e-6;             ///< max |step| in transformed coordinates
  int max_iters = 200;
  double ridge_base = 1e-8;
  int max_halvings = 30;
  double gradient_tolerance = 1e-6;  ///< projected ||G||_inf at convergence
  bool allow_negative_clayton = false;
  double clayton_alpha_min = 0.01;
  double clayton_alpha_max = 1000.0;
  int tau_min = 0;                   ///< 0 means 3
  int tau_max = 0;                   ///< 0 means T - 3
  bool warm_start = true;
  int workers = 1;                   ///< profile fan-out, only without warm starts

  /// Throws DomainError on invalid settings.
  void validate() const;
};

struct InnerFit {
  ModelParams params;
  double loglik;
  bool converged;
  int iterations;
  std::vector<double> trace;  ///< ||step||_inf per accepted iteration
};

struct ProfilePoint {
  int tau;
  double loglik;  ///< -inf when the inner fit failed
};

struct FitResult {
  ModelParams params;
  ChangePoint cp;
  double loglik;
  double aic;
  bool converged;
  int iterations;
  std::vector<ProfilePoint> profile;
  std::vector<double> trace;
};

/// Method-of-moments Weibull start for each segment, alpha0 = alpha1 = 2.
ModelParams default_init(const Series& series, ChangePoint cp,
                         copula::Family family = copula::Family::Clayton, double alpha01 = 2.0);

/// Safeguarded Newton-Raphson over (K0, K1, Lambda0, Lambda1, A0, A1) at a
/// fixed change point. Throws SingularHessian, NonConvergence, or the
/// DomainError raised by the likelihood at the starting point.
InnerFit fit_at_tau(const Series& series, ChangePoint cp, copula::Family family, double alpha01,
                    const std::optional<ModelParams>& init, const NewtonConfig& cfg);

/// Profiles every tau in range and returns the best inner fit.
/// Throws AllProfilesFailed when no tau produced a converged fit.
FitResult profile_fit(const Series& series, copula::Family family, double alpha01,
                      const NewtonConfig& cfg);

}  // namespace cpcm
