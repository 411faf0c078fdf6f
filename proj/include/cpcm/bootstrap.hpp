#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cpcm/optimizer.hpp"

namespace cpcm {

struct BootstrapConfig {
  int replications = 1000;  ///< B
  double level = 0.95;
  std::uint64_t seed = 1;
  int max_retries_per_rep = 3;
  int workers = 1;
  bool anchored_tau_interval = false;  ///< window forced to start at the smallest replicate
  NewtonConfig newton;

  void validate() const;
};

struct Interval {
  double lo;
  double hi;
};

/// Replicate estimate in natural units: tau, k0, k1, lambda0, lambda1, alpha0, alpha1.
using Replicate = std::array<double, 7>;

struct BootstrapResult {
  std::array<Interval, 6> intervals;  ///< k0, k1, lambda0, lambda1, alpha0, alpha1
  std::pair<int, int> tau_interval;
  std::vector<Replicate> replicates;  ///< successful replications in index order
  int failures;
  int replications;
  double level;
};

/// Shortest window [a_i, a_j] over the sorted distinct values holding at
/// least level * N of the estimates. Ties go to higher coverage, then to the
/// smaller left endpoint. With `anchored` the window starts at the minimum.
std::pair<int, int> tau_interval(std::span<const int> estimates, double level,
                                 bool anchored = false);

/// Percentile interval from the order statistics ceil(a/2 N) and
/// floor((1 - a/2) N), a = 1 - level, clamped to [1, N].
Interval percentile_interval(std::vector<double> values, double level);

/// Simulates B series from the fitted model, refits each with profile_fit and
/// builds percentile intervals (in transformed coordinates, mapped back) and
/// the tau window. Throws Error when more than 5% of replications fail.
BootstrapResult parametric_bootstrap(const Series& series, const FitResult& fit,
                                     copula::Family family, double alpha01,
                                     const BootstrapConfig& cfg);

}  // namespace cpcm
