#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cpcm/copula.hpp"
#include "cpcm/weibull.hpp"

namespace cpcm {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Coordinate order shared by gradients, Hessians and transformed parameters.
enum Coordinate : int { kK0 = 0, kK1 = 1, kLambda0 = 2, kLambda1 = 3, kA0 = 4, kA1 = 5 };

/// Positive observations X_1..X_T in time order, with optional opaque labels.
class Series {
 public:
  /// Throws ObservationError for non-positive or non-finite values, and
  /// DomainError when labels are given with a mismatched length.
  explicit Series(std::vector<double> values, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

/// 1-based index of the last pre-change observation, 3 <= tau <= T - 3.
class ChangePoint {
 public:
  ChangePoint(int tau, std::size_t series_length);

  int tau() const noexcept { return tau_; }

  friend bool operator==(const ChangePoint&, const ChangePoint&) = default;

 private:
  int tau_;
};

struct ModelParams {
  weibull::WeibullParams gamma0;
  weibull::WeibullParams gamma1;
  double alpha0;
  double alpha1;
  double alpha01;  ///< junction dependence, fixed during estimation
  copula::Family family;

  /// Throws DomainError if any alpha violates the family constraint.
  void validate() const;
};

/// Unconstrained coordinates: K = log k, Lambda = log lambda,
/// A = log(alpha + 1) for Clayton and log(alpha - 1) for Joe.
struct TransformedParams {
  double k0;
  double k1;
  double lambda0;
  double lambda1;
  double a0;
  double a1;

  Vector6 as_vector() const;
  static TransformedParams from_vector(const Vector6& v);
};

namespace likelihood {

TransformedParams transform(const ModelParams& params);
ModelParams untransform(const TransformedParams& tp, copula::Family family, double alpha01);

/// Marginal and copula blocks of the log-likelihood, summed independently.
struct Decomposition {
  double marginal;
  double copula;
  double total() const { return marginal + copula; }
};

double log_likelihood(const Series& series, const ModelParams& params, ChangePoint cp);
Decomposition decompose(const Series& series, const ModelParams& params, ChangePoint cp);

enum class Order { Value, Gradient, Hessian };

struct Evaluation {
  double value = 0.0;
  Vector6 gradient = Vector6::Zero();
  Matrix6 hessian = Matrix6::Zero();
};

/// Log-likelihood with derivatives in the natural parameters
/// (k0, k1, lambda0, lambda1, alpha0, alpha1).
Evaluation evaluate_natural(const Series& series, const ModelParams& params, ChangePoint cp,
                            Order order);

/// Log-likelihood with derivatives in the transformed coordinates.
Evaluation evaluate(const Series& series, const TransformedParams& tp, ChangePoint cp,
                    copula::Family family, double alpha01, Order order);

Vector6 gradient(const Series& series, const TransformedParams& tp, ChangePoint cp,
                 copula::Family family, double alpha01);
Matrix6 hessian(const Series& series, const TransformedParams& tp, ChangePoint cp,
                copula::Family family, double alpha01);

}  // namespace likelihood
}  // namespace cpcm
