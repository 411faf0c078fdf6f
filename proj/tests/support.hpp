#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cpcm/weibull.hpp"

namespace cpcm::support {

// Sample Kendall tau of consecutive pairs (x[i], x[i+1]); ties count as neither.
inline double lag1_kendall(std::span<const double> x) {
  const std::size_t n = x.size() - 1;
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (x[i + 1] - x[j + 1]);
      if (s > 0) ++concordant;
      if (s < 0) ++discordant;
    }
  }
  return static_cast<double>(concordant - discordant) /
         (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

// Two-sided Kolmogorov-Smirnov distance to a Weibull CDF.
inline double ks_distance(std::vector<double> x, const weibull::WeibullParams& p) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = weibull::cdf(x[i], p);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace cpcm::support
