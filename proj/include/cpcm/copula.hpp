#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cpcm::copula {

enum class Family { Clayton, Joe };

std::string_view to_string(Family family) noexcept;
/// Case-insensitive "clayton" / "joe".
std::optional<Family> parse_family(std::string_view name) noexcept;

/// Copula family plus its dependence parameter alpha.
///
/// Clayton accepts alpha in (-1, inf); |alpha| < kIndependenceBand is treated
/// as the independence limit. Joe accepts alpha >= 1.
class CopulaSpec {
 public:
  CopulaSpec(Family family, double alpha);

  Family family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }

  friend bool operator==(const CopulaSpec&, const CopulaSpec&) = default;

 private:
  Family family_;
  double alpha_;
};

/// Uniforms are clamped to [kClamp, 1 - kClamp] before logs and powers.
inline constexpr double kClamp = 1e-12;
inline constexpr double kIndependenceBand = 1e-6;

/// Log-density and its partials in (u, v, alpha).
struct LogDensityPartials {
  double value = 0.0;
  double du = 0.0;
  double dv = 0.0;
  double da = 0.0;
  double duu = 0.0;
  double dvv = 0.0;
  double daa = 0.0;
  double duv = 0.0;
  double dua = 0.0;
  double dva = 0.0;
};

double cdf(double u, double v, const CopulaSpec& spec);

/// Throws IndicatorViolation for negative-alpha Clayton outside its support.
double log_density(double u, double v, const CopulaSpec& spec);
double density(double u, double v, const CopulaSpec& spec);
LogDensityPartials log_density_partials(double u, double v, const CopulaSpec& spec);

/// Same as above with the complements ubar = 1 - u and vbar = 1 - v supplied
/// by the caller, so the Joe tail keeps full precision when u is close to 1.
double log_density(double u, double ubar, double v, double vbar, const CopulaSpec& spec);
LogDensityPartials log_density_partials(double u, double ubar, double v, double vbar,
                                        const CopulaSpec& spec);

/// Conditional distribution P(V <= v | U = u) = dC/du.
double h_function(double v, double u, const CopulaSpec& spec);

/// Solves h_function(v, u) = w for v. Joe uses bisection and throws
/// ConvergenceFailure when `max_iterations` is exhausted.
double h_inverse(double w, double u, const CopulaSpec& spec, int max_iterations = 200);

/// Kendall's tau. Closed form for Clayton, adaptive quadrature of the
/// generator integral for Joe.
double kendall_tau(const CopulaSpec& spec);

}  // namespace cpcm::copula
