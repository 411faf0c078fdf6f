#include "cpcm/selection.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "cpcm/error.hpp"

namespace cpcm {

using copula::Family;

double aic(double loglik, int n_params) {
  if (n_params < 1) throw DomainError("n_params must be >= 1");
  return 2.0 * n_params - 2.0 * loglik;
}

std::optional<Candidate> parse_candidate(std::string_view text) {
  const auto colon = text.find(':');
  const auto family = copula::parse_family(text.substr(0, colon));
  if (!family) return std::nullopt;
  Candidate c{*family, 2.0};
  if (colon != std::string_view::npos) {
    const std::string_view num = text.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c.alpha01);
    if (ec != std::errc() || ptr != num.data() + num.size() || !std::isfinite(c.alpha01)) {
      return std::nullopt;
    }
  }
  try {
    copula::CopulaSpec(c.family, c.alpha01);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return c;
}

namespace {

constexpr double kTieTolerance = 1e-9;

// Strict preference used for the winner: lower AIC, then Clayton, then smaller alpha01.
bool preferred(const CandidateOutcome& a, const CandidateOutcome& b) {
  if (std::abs(a.aic - b.aic) > kTieTolerance) return a.aic < b.aic;
  if (a.candidate.family != b.candidate.family) return a.candidate.family == Family::Clayton;
  return a.candidate.alpha01 < b.candidate.alpha01;
}

}  // namespace

ModelComparison compare(const Series& series, const std::vector<Candidate>& candidates,
                        const NewtonConfig& cfg, int n_params) {
  if (candidates.empty()) throw DomainError("compare needs at least one candidate");
  ModelComparison out{{}, 0, n_params};
  std::optional<std::size_t> winner;
  for (const Candidate& c : candidates) {
    CandidateOutcome o{c, std::nullopt, std::numeric_limits<double>::infinity(), {}};
    try {
      o.fit = profile_fit(series, c.family, c.alpha01, cfg);
      o.aic = aic(o.fit->loglik, n_params);
      o.fit->aic = o.aic;
    } catch (const Error& e) {
      o.failure = e.what();
    }
    out.candidates.push_back(std::move(o));
    const std::size_t i = out.candidates.size() - 1;
    if (out.candidates[i].fit && (!winner || preferred(out.candidates[i], out.candidates[*winner]))) {
      winner = i;
    }
  }
  if (!winner) throw AllProfilesFailed("every candidate model failed to fit");
  out.winner = *winner;
  return out;
}

}  // namespace cpcm
