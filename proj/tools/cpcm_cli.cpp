#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cpcm/bootstrap.hpp"
#include "cpcm/data.hpp"
#include "cpcm/error.hpp"
#include "cpcm/optimizer.hpp"
#include "cpcm/report.hpp"
#include "cpcm/selection.hpp"
#include "cpcm/simulate.hpp"

namespace fs = std::filesystem;
using namespace cpcm;

namespace {

// Bad input detected after CLI11 parsing; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string quote(const std::string& v) {
  if (!v.empty() && v.find_first_of(" \t\"=") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// One diagnostic line of key=value pairs on stderr.
void diag(std::initializer_list<std::pair<std::string, std::string>> fields) {
  std::string line;
  for (const auto& [k, v] : fields) {
    if (!line.empty()) line += ' ';
    line += k + "=" + quote(v);
  }
  std::cerr << line << '\n';
}

std::string str(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

CLI::Option* add_copula(CLI::App* cmd, std::string& target) {
  target = "clayton";
  return cmd->add_option("--copula", target, "clayton or joe")
      ->check(CLI::IsMember({"clayton", "joe"}, CLI::ignore_case))
      ->capture_default_str();
}

copula::Family family_of(const std::string& name) { return *copula::parse_family(name); }

const std::map<std::string, report::Format> kFormats{{"json", report::Format::Json},
                                                    {"csv", report::Format::Csv},
                                                    {"md", report::Format::Markdown}};

struct Output {
  std::string path;
  std::string format;

  void add(CLI::App* cmd, const std::string& default_format) {
    cmd->add_option("--out", path, "Report path, written atomically (stdout when omitted)");
    format = default_format;
    cmd->add_option("--format", format, "Report format; inferred from the --out extension when not given")
        ->check(CLI::IsMember({"json", "csv", "md"}));
  }

  report::Format resolve(CLI::App* cmd) const {
    if (cmd->count("--format") == 0 && !path.empty()) {
      const auto ext = fs::path(path).extension().string();
      if (ext == ".csv") return report::Format::Csv;
      if (ext == ".md") return report::Format::Markdown;
      if (ext == ".json") return report::Format::Json;
    }
    return kFormats.at(format);
  }

  template <class Report>
  void emit(CLI::App* cmd, const Report& r) const {
    const auto f = resolve(cmd);
    if (path.empty()) {
      std::cout << report::render(r, f);
    } else {
      report::write_report(r, path, f);
      diag({{"event", "written"}, {"path", path}});
    }
  }
};

struct NewtonFlags {
  NewtonConfig cfg;

  void add(CLI::App* cmd) {
    cmd->add_option("--tau-min", cfg.tau_min, "Smallest change point profiled (default 3)");
    cmd->add_option("--tau-max", cfg.tau_max, "Largest change point profiled (default T-3)");
    cmd->add_option("--epsilon", cfg.epsilon, "Newton step tolerance")->capture_default_str();
    cmd->add_option("--max-iters", cfg.max_iters, "Newton iteration cap")->capture_default_str();
  }

  NewtonConfig checked() const {
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

Series load_series(const std::string& path) {
  const auto raw = data::read_csv(path);
  if (raw.rows.size() < 7) {
    throw UsageError("input has " + std::to_string(raw.rows.size()) + " rows; at least 7 are needed");
  }
  return raw.to_series();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-regime Weibull series linked by a Clayton or Joe copula.\n"
               "Settings come from flags first, then CPCM_* environment variables, then defaults."};
  app.require_subcommand(1);

  // Each subcommand keeps its own seed default.
  std::map<const CLI::App*, std::uint64_t> seeds;
  int workers = 1;
  const auto add_common = [&](CLI::App* cmd, std::uint64_t default_seed) {
    std::uint64_t& seed = seeds[cmd];
    seed = default_seed;
    cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
    cmd->add_option("--workers", workers, "Worker threads")
        ->envname("CPCM_WORKERS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Profile-likelihood fit of one series");
  std::string fit_input;
  std::string fit_family;
  double fit_alpha01 = 2.0;
  NewtonFlags fit_newton;
  Output fit_out;
  std::string plot_dir;
  fit_cmd->add_option("--input", fit_input, "CSV with date,value columns")->required();
  add_copula(fit_cmd, fit_family);
  fit_cmd->add_option("--alpha01", fit_alpha01, "Junction dependence held fixed")->capture_default_str();
  fit_cmd->add_option("--plot-dir", plot_dir,
                      "Directory for profile.csv and series_annotated.csv (default: next to --out)");
  fit_newton.add(fit_cmd);
  fit_out.add(fit_cmd, "json");
  add_common(fit_cmd, 0);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a two-regime series as CSV");
  std::string sim_family;
  double k0 = 1.8, k1 = 2.1, l0 = 1.2, l1 = 1.5, a0 = 2.0, a1 = 2.0, a01 = 2.0;
  int sim_tau = 125, sim_length = 250;
  std::string sim_out;
  add_copula(sim_cmd, sim_family);
  sim_cmd->add_option("--k0", k0)->capture_default_str();
  sim_cmd->add_option("--k1", k1)->capture_default_str();
  sim_cmd->add_option("--l0", l0)->capture_default_str();
  sim_cmd->add_option("--l1", l1)->capture_default_str();
  sim_cmd->add_option("--a0", a0)->capture_default_str();
  sim_cmd->add_option("--a1", a1)->capture_default_str();
  sim_cmd->add_option("--a01", a01)->capture_default_str();
  sim_cmd->add_option("--tau", sim_tau)->capture_default_str();
  sim_cmd->add_option("--T", sim_length, "Series length")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "CSV path (stdout when omitted)");
  add_common(sim_cmd, 1);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo study from a named preset");
  std::string preset_name;
  int bench_reps = 500;
  Output bench_out;
  bench_cmd->add_option("--preset", preset_name, "table1 ... table12")->required();
  bench_cmd->add_option("--replications", bench_reps, "R per configuration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_out.add(bench_cmd, "md");
  add_common(bench_cmd, 2024);

  // bootstrap
  auto* boot_cmd = app.add_subcommand("bootstrap", "Fit, then parametric bootstrap intervals");
  std::string boot_input;
  std::string boot_family;
  double boot_alpha01 = 2.0;
  BootstrapConfig boot_cfg;
  NewtonFlags boot_newton;
  Output boot_out;
  boot_cmd->add_option("--input", boot_input, "CSV with date,value columns")->required();
  add_copula(boot_cmd, boot_family);
  boot_cmd->add_option("--alpha01", boot_alpha01)->capture_default_str();
  boot_cmd->add_option("--B", boot_cfg.replications, "Bootstrap replications")->capture_default_str();
  boot_cmd->add_option("--level", boot_cfg.level, "Interval coverage in (0,1)")->capture_default_str();
  boot_cmd->add_option("--max-retries", boot_cfg.max_retries_per_rep)->capture_default_str();
  boot_cmd->add_flag("--anchored-tau", boot_cfg.anchored_tau_interval,
                     "Start the tau window at the smallest replicate");
  boot_newton.add(boot_cmd);
  boot_out.add(boot_cmd, "json");
  add_common(boot_cmd, 1);

  // interarrival
  auto* ia_cmd = app.add_subcommand("interarrival", "Waiting times between threshold exceedances");
  std::string ia_input;
  double threshold = 30.0;
  Output ia_out;
  ia_cmd->add_option("--input", ia_input, "CSV with date,value columns")->required();
  ia_cmd->add_option("--threshold", threshold, "Exceedance means value > threshold")->capture_default_str();
  ia_out.add(ia_cmd, "csv");
  add_common(ia_cmd, 0);

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "AIC comparison of copula families");
  std::string cmp_input;
  std::string candidates_spec = "clayton:2,joe:2";
  int n_params = kDefaultParameterCount;
  NewtonFlags cmp_newton;
  Output cmp_out;
  cmp_cmd->add_option("--input", cmp_input, "CSV with date,value columns")->required();
  cmp_cmd->add_option("--candidates", candidates_spec, "Comma-separated family[:alpha01] list")
      ->capture_default_str();
  cmp_cmd->add_option("--n-params", n_params, "Parameter count in the AIC")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmp_newton.add(cmp_cmd);
  cmp_out.add(cmp_cmd, "json");
  add_common(cmp_cmd, 0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd) {
      NewtonConfig cfg = fit_newton.checked();
      const Series series = load_series(fit_input);
      const FitResult fit = profile_fit(series, family_of(fit_family), fit_alpha01, cfg);
      diag({{"event", "fit"}, {"tau", std::to_string(fit.cp.tau())}, {"loglik", str(fit.loglik)},
            {"aic", str(fit.aic)}, {"iterations", std::to_string(fit.iterations)}});
      fit_out.emit(fit_cmd, fit);
      fs::path dir = plot_dir;
      if (dir.empty() && !fit_out.path.empty()) dir = fs::path(fit_out.path).parent_path();
      if (!plot_dir.empty() || !fit_out.path.empty()) {
        if (dir.empty()) dir = ".";
        data::write_atomic(dir / "profile.csv", report::profile_csv(fit));
        data::write_atomic(dir / "series_annotated.csv", report::annotated_series_csv(series, fit));
      }
    } else if (*sim_cmd) {
      if (sim_length < 7) throw UsageError("--T must be at least 7");
      ModelParams truth{weibull::WeibullParams(k0, l0), weibull::WeibullParams(k1, l1), a0, a1, a01,
                        family_of(sim_family)};
      std::optional<ChangePoint> cp;
      try {
        truth.validate();
        cp.emplace(sim_tau, static_cast<std::size_t>(sim_length));
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const Series s = gen_series(truth, *cp, sim_length, seeds[sim_cmd]);
      std::ostringstream csv;
      csv.precision(17);
      csv << "date,value\n";
      for (std::size_t i = 0; i < s.size(); ++i) csv << i + 1 << ',' << s[i] << '\n';
      if (sim_out.empty()) {
        std::cout << csv.str();
      } else {
        data::write_atomic(sim_out, csv.str());
        diag({{"event", "written"}, {"path", sim_out}});
      }
    } else if (*bench_cmd) {
      std::vector<StudyConfig> configs;
      try {
        configs = preset(preset_name, bench_reps, seeds[bench_cmd]);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      for (auto& c : configs) c.workers = workers;
      std::vector<StudyReport> reports;
      bool failed = false;
      const auto grid = study_grid(configs);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].report) {
          reports.push_back(*grid[i].report);
          diag({{"event", "study"}, {"name", configs[i].name},
                {"failures", std::to_string(grid[i].report->failures)},
                {"seconds", str(grid[i].report->wall_seconds)}});
        } else {
          failed = true;
          diag({{"event", "study_failed"}, {"name", configs[i].name}, {"message", grid[i].error}});
        }
      }
      bench_out.emit(bench_cmd, reports);
      if (failed) return 1;
    } else if (*boot_cmd) {
      boot_cfg.seed = seeds[boot_cmd];
      boot_cfg.workers = workers;
      boot_cfg.newton = boot_newton.checked();
      try {
        boot_cfg.validate();
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const Series series = load_series(boot_input);
      const FitResult fit = profile_fit(series, family_of(boot_family), boot_alpha01, boot_cfg.newton);
      diag({{"event", "fit"}, {"tau", std::to_string(fit.cp.tau())}, {"loglik", str(fit.loglik)}});
      const BootstrapResult r = parametric_bootstrap(series, fit, family_of(boot_family), boot_alpha01, boot_cfg);
      diag({{"event", "bootstrap"}, {"B", std::to_string(r.replications)},
            {"failures", std::to_string(r.failures)}});
      boot_out.emit(boot_cmd, r);
    } else if (*ia_cmd) {
      if (!std::isfinite(threshold)) throw UsageError("--threshold must be finite");
      data::RawSeries raw;
      if (!fs::exists(ia_input) || fs::file_size(ia_input) > 0) raw = data::read_csv(ia_input);
      const auto events = data::interarrival(raw, threshold);
      diag({{"event", "interarrival"}, {"count", std::to_string(events.events.size())},
            {"trailing", std::to_string(events.trailing)}});
      ia_out.emit(ia_cmd, events);
    } else if (*cmp_cmd) {
      std::vector<Candidate> candidates;
      std::stringstream spec(candidates_spec);
      for (std::string item; std::getline(spec, item, ',');) {
        const auto c = parse_candidate(item);
        if (!c) throw UsageError("malformed candidate '" + item + "'");
        candidates.push_back(*c);
      }
      if (candidates.empty()) throw UsageError("--candidates is empty");
      NewtonConfig cfg = cmp_newton.checked();
      const Series series = load_series(cmp_input);
      const ModelComparison cmp = compare(series, candidates, cfg, n_params);
      for (const auto& o : cmp.candidates) {
        diag({{"event", "candidate"}, {"family", std::string(copula::to_string(o.candidate.family))},
              {"alpha01", str(o.candidate.alpha01)}, {"aic", str(o.aic)},
              {"failure", o.failure}});
      }
      diag({{"event", "winner"}, {"index", std::to_string(cmp.winner)}});
      cmp_out.emit(cmp_cmd, cmp);
    }
  } catch (const UsageError& e) {
    diag({{"error", "usage"}, {"message", e.what()}});
    return 2;
  } catch (const ParseError& e) {
    diag({{"error", "parse"}, {"row", std::to_string(e.row())}, {"column", std::to_string(e.column())},
          {"message", e.what()}});
    return 1;
  } catch (const ObservationError& e) {
    diag({{"error", "observation"}, {"t", std::to_string(e.index())}, {"message", e.what()}});
    return 1;
  } catch (const IOError& e) {
    diag({{"error", "io"}, {"message", e.what()}});
    return 1;
  } catch (const Error& e) {
    diag({{"error", "estimation"}, {"message", e.what()}});
    return 1;
  } catch (const std::exception& e) {
    diag({{"error", "internal"}, {"message", e.what()}});
    return 1;
  }
  return 0;
}
