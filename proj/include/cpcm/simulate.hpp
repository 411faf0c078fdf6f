#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpcm/likelihood.hpp"
#include "cpcm/optimizer.hpp"

namespace cpcm {

/// Draws X_1..X_T from the two-regime chain. X_1 comes from the pre-change
/// marginal; later states use the h-function inverse with alpha0 up to tau,
/// alpha01 for the pair (tau, tau+1) and alpha1 afterwards.
Series gen_series(const ModelParams& truth, ChangePoint cp, int length, std::uint64_t seed);

struct StudyConfig {
  std::string name;
  ModelParams truth;
  int tau;
  int length;  ///< T
  int replications;  ///< R
  double assumed_alpha01;
  copula::Family fit_family;
  std::uint64_t seed;
  int workers = 1;
  NewtonConfig newton;

  /// Throws DomainError on invalid settings.
  void validate() const;
};

/// One row of a study table.
struct ParameterSummary {
  std::string parameter;  ///< tau, k0, k1, lambda0, lambda1, alpha0, alpha1
  double truth;
  double mean;
  double rmse;
  double re;
};

struct StudyReport {
  std::string name;
  StudyConfig config;
  std::vector<ParameterSummary> rows;
  int failures;
  double wall_seconds;
};

/// Names of the summarised parameters, in report order.
const std::vector<std::string>& study_parameters();

/// Runs R replications of generate-then-profile-fit. Throws Error when more
/// than 10% of replications fail.
StudyReport run_study(const StudyConfig& cfg);

struct GridEntry {
  std::optional<StudyReport> report;
  std::string error;  ///< set when the config failed
};

/// run_study over each config; one failing config does not stop the others.
std::vector<GridEntry> study_grid(const std::vector<StudyConfig>& configs);

/// "table1" ... "table12".
std::vector<std::string> preset_names();

/// Study configs for a named preset. Throws DomainError for unknown names.
std::vector<StudyConfig> preset(std::string_view name, int replications, std::uint64_t seed = 2024);

}  // namespace cpcm
