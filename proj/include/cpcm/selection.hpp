#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpcm/optimizer.hpp"

namespace cpcm {

/// Six continuous parameters plus the change point.
inline constexpr int kDefaultParameterCount = 7;

/// 2 p - 2 loglik. Throws DomainError when n_params < 1.
double aic(double loglik, int n_params);

struct Candidate {
  copula::Family family;
  double alpha01;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Parses "clayton:2" or "joe" (alpha01 defaults to 2).
std::optional<Candidate> parse_candidate(std::string_view text);

struct CandidateOutcome {
  Candidate candidate;
  std::optional<FitResult> fit;  ///< empty when the fit failed
  double aic;                    ///< +inf for failed candidates
  std::string failure;
};

struct ModelComparison {
  std::vector<CandidateOutcome> candidates;
  std::size_t winner;
  int n_params;
};

/// Fits every candidate with profile_fit and picks the minimum AIC. AIC ties
/// within 1e-9 go to Clayton, then to the smaller alpha01. Throws
/// AllProfilesFailed when no candidate could be fitted.
ModelComparison compare(const Series& series, const std::vector<Candidate>& candidates,
                        const NewtonConfig& cfg, int n_params = kDefaultParameterCount);

}  // namespace cpcm
