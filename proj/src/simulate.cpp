#include "cpcm/simulate.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

#include "cpcm/error.hpp"
#include "cpcm/random.hpp"

namespace cpcm {

using copula::CopulaSpec;
using copula::Family;
using weibull::WeibullParams;

Series gen_series(const ModelParams& truth, ChangePoint cp, int length, std::uint64_t seed) {
  truth.validate();
  if (length < 7) throw DomainError("series length must be >= 7, got " + std::to_string(length));
  const ChangePoint checked(cp.tau(), static_cast<std::size_t>(length));
  const int tau = checked.tau();
  const CopulaSpec spec0(truth.family, truth.alpha0);
  const CopulaSpec spec01(truth.family, truth.alpha01);
  const CopulaSpec spec1(truth.family, truth.alpha1);

  rng::Stream stream(seed);
  std::vector<double> xs(static_cast<std::size_t>(length));
  double u = std::clamp(stream.uniform(), copula::kClamp, 1.0 - copula::kClamp);
  xs[0] = weibull::quantile(u, truth.gamma0);
  for (int t = 2; t <= length; ++t) {
    const CopulaSpec& spec = t <= tau ? spec0 : (t == tau + 1 ? spec01 : spec1);
    const double w = stream.uniform();
    try {
      u = copula::h_inverse(w, u, spec);
    } catch (const ConvergenceFailure& e) {
      throw ConvergenceFailure("t=" + std::to_string(t) + ": " + e.what());
    }
    u = std::clamp(u, copula::kClamp, 1.0 - copula::kClamp);
    xs[t - 1] = weibull::quantile(u, t <= tau ? truth.gamma0 : truth.gamma1);
  }
  return Series(std::move(xs));
}

void StudyConfig::validate() const {
  truth.validate();
  if (replications < 1) throw DomainError("replications must be >= 1");
  if (length < 7) throw DomainError("series length must be >= 7");
  ChangePoint(tau, static_cast<std::size_t>(length));
  CopulaSpec(fit_family, assumed_alpha01);
  newton.validate();
}

const std::vector<std::string>& study_parameters() {
  static const std::vector<std::string> names{"tau",     "k0",     "k1",    "lambda0",
                                              "lambda1", "alpha0", "alpha1"};
  return names;
}

namespace {

std::array<double, 7> estimate_row(const FitResult& fit) {
  return {static_cast<double>(fit.cp.tau()), fit.params.gamma0.shape(),
          fit.params.gamma1.shape(),          fit.params.gamma0.scale(),
          fit.params.gamma1.scale(),          fit.params.alpha0,
          fit.params.alpha1};
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  const ChangePoint cp(cfg.tau, static_cast<std::size_t>(cfg.length));

  std::vector<std::optional<std::array<double, 7>>> estimates(reps);
  parallel_for(reps, cfg.workers, [&](std::size_t r) {
    try {
      const Series s = gen_series(cfg.truth, cp, cfg.length, rng::derive_seed(cfg.seed, r));
      estimates[r] = estimate_row(profile_fit(s, cfg.fit_family, cfg.assumed_alpha01, cfg.newton));
    } catch (const Error&) {
    }
  });

  const int failures = static_cast<int>(
      std::count_if(estimates.begin(), estimates.end(), [](const auto& e) { return !e; }));
  if (failures * 10 > cfg.replications) {
    throw Error("study " + cfg.name + ": " + std::to_string(failures) + " of " +
                std::to_string(cfg.replications) + " replications failed");
  }

  const std::array<double, 7> truth = {static_cast<double>(cfg.tau), cfg.truth.gamma0.shape(),
                                       cfg.truth.gamma1.shape(),      cfg.truth.gamma0.scale(),
                                       cfg.truth.gamma1.scale(),      cfg.truth.alpha0,
                                       cfg.truth.alpha1};
  std::array<double, 7> sum{}, sq{};
  int ok = 0;
  for (const auto& e : estimates) {
    if (!e) continue;
    ++ok;
    for (std::size_t j = 0; j < 7; ++j) {
      sum[j] += (*e)[j];
      sq[j] += ((*e)[j] - truth[j]) * ((*e)[j] - truth[j]);
    }
  }

  StudyReport report{cfg.name, cfg, {}, failures, 0.0};
  for (std::size_t j = 0; j < 7; ++j) {
    const double rmse = std::sqrt(sq[j] / ok);
    report.rows.push_back({study_parameters()[j], truth[j], sum[j] / ok, rmse, rmse / truth[j]});
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<GridEntry> study_grid(const std::vector<StudyConfig>& configs) {
  std::vector<GridEntry> out;
  out.reserve(configs.size());
  for (const auto& cfg : configs) {
    try {
      out.push_back({run_study(cfg), {}});
    } catch (const std::exception& e) {
      out.push_back({std::nullopt, e.what()});
    }
  }
  return out;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= 12; ++i) names.push_back("table" + std::to_string(i));
  return names;
}

namespace {

std::string family_tag(Family f) { return f == Family::Clayton ? "clayton" : "joe"; }

std::string fmt(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string triple(double a0, double a01, double a1) {
  return "(" + fmt(a0) + "," + fmt(a01) + "," + fmt(a1) + ")";
}

// FNV-1a, stable across platforms unlike std::hash.
std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

StudyConfig design(Family truth_family, double alpha, double alpha01, int length, int tau,
                   int replications, double assumed, Family fit_family) {
  StudyConfig cfg{"",
                  {WeibullParams(1.8, 1.2), WeibullParams(2.1, 1.5), alpha, alpha, alpha01,
                   truth_family},
                  tau,
                  length,
                  replications,
                  assumed,
                  fit_family,
                  0,
                  1,
                  NewtonConfig{}};
  cfg.name = family_tag(truth_family) + " " + triple(alpha, alpha01, alpha) + " T=" +
             std::to_string(length) + " tau=" + std::to_string(tau);
  if (assumed != alpha01) cfg.name += " assumed_alpha01=" + fmt(assumed);
  if (fit_family != truth_family) cfg.name += " fit=" + family_tag(fit_family);
  return cfg;
}

}  // namespace

std::vector<StudyConfig> preset(std::string_view name, int replications, std::uint64_t seed) {
  std::vector<StudyConfig> out;
  const auto same = [&](Family f, double a, int length, int tau) {
    out.push_back(design(f, a, a, length, tau, replications, a, f));
  };
  const Family C = Family::Clayton;
  const Family J = Family::Joe;

  if (name == "table1") {
    for (Family f : {C, J}) {
      for (double a : {2.0, 8.0}) same(f, a, 250, 125);
    }
  } else if (name == "table2" || name == "table3" || name == "table4" || name == "table5") {
    const Family f = (name == "table2" || name == "table4") ? C : J;
    const double a = (name == "table2" || name == "table3") ? 2.0 : 8.0;
    for (int tau : {25, 50, 83, 125}) same(f, a, 250, tau);
  } else if (name == "table6" || name == "table7" || name == "table8" || name == "table9") {
    const Family f = (name == "table6" || name == "table8") ? C : J;
    const double a = (name == "table6" || name == "table7") ? 2.0 : 8.0;
    for (double assumed : {1.0, 2.0, 4.0, 8.0}) {
      out.push_back(design(f, a, a, 250, 125, replications, assumed, f));
    }
  } else if (name == "table10" || name == "table11") {
    const Family f = name == "table10" ? C : J;
    for (double a : {2.0, 8.0}) {
      same(f, a, 100, 50);
      same(f, a, 250, 125);
    }
  } else if (name == "table12") {
    for (Family truth : {C, J}) {
      for (Family fit : {C, J}) out.push_back(design(truth, 2.0, 2.0, 250, 125, replications, 2.0, fit));
    }
  } else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw DomainError("unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  for (auto& cfg : out) cfg.seed = rng::derive_seed(seed, name_hash(cfg.name));
  return out;
}

}  // namespace cpcm
