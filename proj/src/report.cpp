#include "cpcm/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cpcm/error.hpp"

namespace cpcm::report {

using copula::Family;
using weibull::WeibullParams;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest text that parses back to the same double.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// JSON has no infinities; failed profile points are stored as null.
ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* const kParamNames[6] = {"k0", "k1", "lambda0", "lambda1", "alpha0", "alpha1"};

std::array<double, 6> natural(const ModelParams& p) {
  return {p.gamma0.shape(), p.gamma1.shape(), p.gamma0.scale(),
          p.gamma1.scale(), p.alpha0,         p.alpha1};
}

std::string md_name(const std::string& p) {
  if (p == "tau") return "τ";
  if (p == "k0") return "k₀";
  if (p == "k1") return "k₁";
  if (p == "lambda0") return "λ₀";
  if (p == "lambda1") return "λ₁";
  if (p == "alpha0") return "α₀";
  if (p == "alpha1") return "α₁";
  return p;
}

}  // namespace

std::optional<Format> parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "md" || name == "markdown") return Format::Markdown;
  return std::nullopt;
}

ordered_json to_json(const ModelParams& p) {
  return {{"family", std::string(copula::to_string(p.family))},
          {"k0", p.gamma0.shape()},
          {"k1", p.gamma1.shape()},
          {"lambda0", p.gamma0.scale()},
          {"lambda1", p.gamma1.scale()},
          {"alpha0", p.alpha0},
          {"alpha1", p.alpha1},
          {"alpha01", p.alpha01}};
}

ModelParams params_from_json(const ordered_json& j) {
  const auto family = copula::parse_family(j.at("family").get<std::string>());
  if (!family) throw DomainError("unknown copula family in report");
  ModelParams p{WeibullParams(j.at("k0").get<double>(), j.at("lambda0").get<double>()),
                WeibullParams(j.at("k1").get<double>(), j.at("lambda1").get<double>()),
                j.at("alpha0").get<double>(),
                j.at("alpha1").get<double>(),
                j.at("alpha01").get<double>(),
                *family};
  p.validate();
  return p;
}

ordered_json to_json(const FitResult& fit) {
  ordered_json profile = ordered_json::array();
  for (const auto& pt : fit.profile) {
    profile.push_back({{"tau", pt.tau}, {"loglik", finite_or_null(pt.loglik)}});
  }
  return {{"tau", fit.cp.tau()},
          {"params", to_json(fit.params)},
          {"loglik", fit.loglik},
          {"aic", fit.aic},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"trace", fit.trace},
          {"profile", profile}};
}

FitResult fit_from_json(const ordered_json& j, std::size_t series_length) {
  std::vector<ProfilePoint> profile;
  for (const auto& pt : j.at("profile")) {
    const auto& ll = pt.at("loglik");
    profile.push_back({pt.at("tau").get<int>(), ll.is_null() ? -kInf : ll.get<double>()});
  }
  return {params_from_json(j.at("params")),
          ChangePoint(j.at("tau").get<int>(), series_length),
          j.at("loglik").get<double>(),
          j.at("aic").get<double>(),
          j.at("converged").get<bool>(),
          j.at("iterations").get<int>(),
          std::move(profile),
          j.at("trace").get<std::vector<double>>()};
}

ordered_json to_json(const StudyReport& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"parameter", row.parameter},
                    {"true_value", row.truth},
                    {"mean", row.mean},
                    {"rmse", row.rmse},
                    {"re", row.re}});
  }
  const StudyConfig& c = r.config;
  return {{"name", r.name},
          {"truth", to_json(c.truth)},
          {"tau", c.tau},
          {"T", c.length},
          {"replications", c.replications},
          {"assumed_alpha01", c.assumed_alpha01},
          {"fit_family", std::string(copula::to_string(c.fit_family))},
          {"seed", c.seed},
          {"failures", r.failures},
          {"rows", rows}};
}

ordered_json to_json(const BootstrapResult& r) {
  ordered_json intervals = ordered_json::object();
  for (int i = 0; i < 6; ++i) {
    intervals[kParamNames[i]] = {r.intervals[i].lo, r.intervals[i].hi};
  }
  ordered_json reps = ordered_json::array();
  for (const auto& rep : r.replicates) reps.push_back(rep);
  return {{"B", r.replications},
          {"level", r.level},
          {"failures", r.failures},
          {"intervals", intervals},
          {"tau_interval", {r.tau_interval.first, r.tau_interval.second}},
          {"replicate_columns", {"tau", "k0", "k1", "lambda0", "lambda1", "alpha0", "alpha1"}},
          {"replicates", reps}};
}

ordered_json to_json(const ModelComparison& c) {
  ordered_json cands = ordered_json::array();
  for (const auto& o : c.candidates) {
    ordered_json j = {{"family", std::string(copula::to_string(o.candidate.family))},
                      {"alpha01", o.candidate.alpha01},
                      {"aic", finite_or_null(o.aic)}};
    j["fit"] = o.fit ? to_json(*o.fit) : ordered_json();
    if (!o.failure.empty()) j["failure"] = o.failure;
    cands.push_back(std::move(j));
  }
  return {{"n_params", c.n_params}, {"winner", c.winner}, {"candidates", cands}};
}

ordered_json to_json(const data::InterarrivalSeries& s) {
  ordered_json events = ordered_json::array();
  for (const auto& e : s.events) {
    events.push_back({{"label", e.label}, {"row", e.row}, {"T", e.waiting}});
  }
  return {{"events", events}, {"trailing", s.trailing}};
}

std::string render(const FitResult& fit, Format format) {
  if (format == Format::Json) return to_json(fit).dump(2) + "\n";
  const auto values = natural(fit.params);
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "parameter,value\n";
    out << "tau," << fit.cp.tau() << "\n";
    for (int i = 0; i < 6; ++i) out << kParamNames[i] << "," << num(values[i]) << "\n";
    out << "alpha01," << num(fit.params.alpha01) << "\n";
    out << "loglik," << num(fit.loglik) << "\n";
    out << "aic," << num(fit.aic) << "\n";
    return out.str();
  }
  out << "| Parameter | Estimation |\n|---|---|\n";
  out << "| τ | " << fit.cp.tau() << " |\n";
  for (int i = 0; i < 6; ++i) out << "| " << md_name(kParamNames[i]) << " | " << fixed(values[i], 4) << " |\n";
  out << "| AIC | " << fixed(fit.aic, 1) << " |\n";
  return out.str();
}

std::string render(const std::vector<StudyReport>& reports, Format format) {
  if (format == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "study,parameter,true_value,mean,rmse,re\n";
    for (const auto& r : reports) {
      for (const auto& row : r.rows) {
        out << csv_field(r.name) << "," << row.parameter << "," << num(row.truth) << ","
            << num(row.mean) << "," << num(row.rmse) << "," << num(row.re) << "\n";
      }
    }
    return out.str();
  }
  for (const auto& r : reports) {
    out << "### " << r.name << " (R=" << r.config.replications << ", failures=" << r.failures
        << ")\n\n";
    out << "| Parameter | True value | Ê | RMSE | RE |\n|---|---|---|---|---|\n";
    for (const auto& row : r.rows) {
      out << "| " << md_name(row.parameter) << " | " << num(row.truth) << " | "
          << fixed(row.mean, row.parameter == "tau" ? 2 : 4) << " | " << fixed(row.rmse, 4)
          << " | " << fixed(row.re, 4) << " |\n";
    }
    out << "\n";
  }
  return out.str();
}

std::string render(const BootstrapResult& r, Format format) {
  if (format == Format::Json) return to_json(r).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "parameter,lo,hi\n";
    for (int i = 0; i < 6; ++i) {
      out << kParamNames[i] << "," << num(r.intervals[i].lo) << "," << num(r.intervals[i].hi) << "\n";
    }
    out << "tau," << r.tau_interval.first << "," << r.tau_interval.second << "\n";
    return out.str();
  }
  out << "| Parameter | " << fixed(100 * r.level, 0) << "% CI |\n|---|---|\n";
  for (int i = 0; i < 6; ++i) {
    out << "| " << md_name(kParamNames[i]) << " | (" << fixed(r.intervals[i].lo, 4) << ", "
        << fixed(r.intervals[i].hi, 4) << ") |\n";
  }
  out << "| τ | (" << r.tau_interval.first << ", " << r.tau_interval.second << ") |\n";
  return out.str();
}

std::string render(const ModelComparison& c, Format format) {
  if (format == Format::Json) return to_json(c).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "family,alpha01,tau,loglik,aic,winner,failure\n";
    for (std::size_t i = 0; i < c.candidates.size(); ++i) {
      const auto& o = c.candidates[i];
      out << copula::to_string(o.candidate.family) << "," << num(o.candidate.alpha01) << ","
          << (o.fit ? std::to_string(o.fit->cp.tau()) : "") << ","
          << (o.fit ? num(o.fit->loglik) : "") << "," << num(o.aic) << ","
          << (i == c.winner ? 1 : 0) << "," << csv_field(o.failure) << "\n";
    }
    return out.str();
  }
  // Intervals come from the bootstrap subcommand; the column keeps the table layout.
  out << "| Model | α₀₁ | Parameter | Estimation | 95% CI | AIC |\n|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < c.candidates.size(); ++i) {
    const auto& o = c.candidates[i];
    const std::string model =
        std::string(o.candidate.family == Family::Clayton ? "Clayton" : "Joe") +
        (i == c.winner ? " (selected)" : "");
    if (!o.fit) {
      out << "| " << model << " | " << num(o.candidate.alpha01) << " | failed | | | |\n";
      continue;
    }
    const auto values = natural(o.fit->params);
    out << "| " << model << " | " << num(o.candidate.alpha01) << " | τ | " << o.fit->cp.tau()
        << " | | " << fixed(o.aic, 1) << " |\n";
    for (int k = 0; k < 6; ++k) {
      out << "| | | " << md_name(kParamNames[k]) << " | " << fixed(values[k], 4) << " | | |\n";
    }
  }
  return out.str();
}

std::string render(const data::InterarrivalSeries& s, Format format) {
  if (format == Format::Json) return to_json(s).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "date,value\n";
    for (const auto& e : s.events) out << csv_field(e.label) << "," << e.waiting << "\n";
    return out.str();
  }
  out << "| Date | T |\n|---|---|\n";
  for (const auto& e : s.events) out << "| " << e.label << " | " << e.waiting << " |\n";
  return out.str();
}

std::string profile_csv(const FitResult& fit) {
  std::ostringstream out;
  out << "tau,loglik\n";
  for (const auto& pt : fit.profile) out << pt.tau << "," << (std::isfinite(pt.loglik) ? num(pt.loglik) : "nan") << "\n";
  return out.str();
}

std::string annotated_series_csv(const Series& series, const FitResult& fit) {
  std::ostringstream out;
  out << "t,label,value,regime\n";
  const auto& labels = series.labels();
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << i + 1 << "," << (labels.empty() ? "" : csv_field(labels[i])) << "," << num(series[i])
        << "," << (static_cast<int>(i + 1) <= fit.cp.tau() ? 0 : 1) << "\n";
  }
  return out.str();
}

}  // namespace cpcm::report
