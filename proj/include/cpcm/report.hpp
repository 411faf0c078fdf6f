#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cpcm/bootstrap.hpp"
#include "cpcm/data.hpp"
#include "cpcm/optimizer.hpp"
#include "cpcm/selection.hpp"
#include "cpcm/simulate.hpp"

namespace cpcm::report {

using nlohmann::ordered_json;

enum class Format { Json, Csv, Markdown };

/// "json", "csv", "md" / "markdown".
std::optional<Format> parse_format(std::string_view name);

ordered_json to_json(const ModelParams& p);
ordered_json to_json(const FitResult& fit);
ordered_json to_json(const StudyReport& r);
ordered_json to_json(const BootstrapResult& r);
ordered_json to_json(const ModelComparison& c);
ordered_json to_json(const data::InterarrivalSeries& s);

ModelParams params_from_json(const ordered_json& j);
FitResult fit_from_json(const ordered_json& j, std::size_t series_length);

std::string render(const FitResult& fit, Format format);
std::string render(const std::vector<StudyReport>& reports, Format format);
std::string render(const BootstrapResult& r, Format format);
std::string render(const ModelComparison& c, Format format);
std::string render(const data::InterarrivalSeries& s, Format format);

/// Profile curve as `tau,loglik` (failed fits are written as `nan`).
std::string profile_csv(const FitResult& fit);
/// `t,label,value,regime` with regime 0 up to tau-hat and 1 afterwards.
std::string annotated_series_csv(const Series& series, const FitResult& fit);

template <class Report>
void write_report(const Report& report, const std::filesystem::path& path, Format format) {
  data::write_atomic(path, render(report, format));
}

}  // namespace cpcm::report
