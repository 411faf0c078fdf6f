#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cpcm/bootstrap.hpp"
#include "cpcm/copula.hpp"
#include "cpcm/error.hpp"
#include "cpcm/report.hpp"
#include "cpcm/selection.hpp"
#include "cpcm/simulate.hpp"
#include "cpcm/weibull.hpp"

namespace py = pybind11;
using namespace cpcm;

namespace {

// Structured results cross the boundary as the same JSON the CLI writes.
std::string dump(const report::ordered_json& j) { return j.dump(); }

copula::Family family_of(const std::string& name) {
  const auto f = copula::parse_family(name);
  if (!f) throw DomainError("unknown copula family: " + name);
  return *f;
}

Series series_of(std::vector<double> values) { return Series(std::move(values)); }

NewtonConfig newton(int workers) {
  NewtonConfig cfg;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IOError>(m, "IOError", base.ptr());

  m.def("weibull_cdf", [](double x, double k, double lam) {
    return weibull::cdf(x, weibull::WeibullParams(k, lam));
  });
  m.def("weibull_pdf", [](double x, double k, double lam) {
    return weibull::pdf(x, weibull::WeibullParams(k, lam));
  });
  m.def("weibull_quantile", [](double u, double k, double lam) {
    return weibull::quantile(u, weibull::WeibullParams(k, lam));
  });

  m.def("kendall_tau", [](const std::string& family, double alpha) {
    return copula::kendall_tau(copula::CopulaSpec(family_of(family), alpha));
  });
  m.def("h_function", [](double v, double u, const std::string& family, double alpha) {
    return copula::h_function(v, u, copula::CopulaSpec(family_of(family), alpha));
  });

  m.def("log_likelihood", [](std::vector<double> values, const std::string& params_json, int tau) {
    const Series s = series_of(std::move(values));
    const ModelParams p = report::params_from_json(report::ordered_json::parse(params_json));
    return likelihood::log_likelihood(s, p, ChangePoint(tau, s.size()));
  });

  m.def(
      "simulate",
      [](const std::string& params_json, int tau, int length, std::uint64_t seed) {
        const ModelParams p = report::params_from_json(report::ordered_json::parse(params_json));
        const Series s = gen_series(p, ChangePoint(tau, static_cast<std::size_t>(length)), length, seed);
        return std::vector<double>(s.values().begin(), s.values().end());
      },
      py::arg("params_json"), py::arg("tau"), py::arg("length"), py::arg("seed"));

  m.def(
      "fit",
      [](std::vector<double> values, const std::string& family, double alpha01, int workers) {
        const Series s = series_of(std::move(values));
        py::gil_scoped_release release;
        return dump(report::to_json(profile_fit(s, family_of(family), alpha01, newton(workers))));
      },
      py::arg("values"), py::arg("family"), py::arg("alpha01"), py::arg("workers"));

  m.def(
      "bootstrap",
      [](std::vector<double> values, const std::string& family, double alpha01, int replications,
         double level, std::uint64_t seed, int workers) {
        const Series s = series_of(std::move(values));
        const copula::Family f = family_of(family);
        BootstrapConfig cfg;
        cfg.replications = replications;
        cfg.level = level;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.validate();
        py::gil_scoped_release release;
        const FitResult fit = profile_fit(s, f, alpha01, newton(workers));
        return dump(report::to_json(parametric_bootstrap(s, fit, f, alpha01, cfg)));
      },
      py::arg("values"), py::arg("family"), py::arg("alpha01"), py::arg("replications"),
      py::arg("level"), py::arg("seed"), py::arg("workers"));

  m.def(
      "compare",
      [](std::vector<double> values, const std::vector<std::string>& candidates, int workers) {
        const Series s = series_of(std::move(values));
        std::vector<Candidate> parsed;
        for (const auto& text : candidates) {
          const auto c = parse_candidate(text);
          if (!c) throw DomainError("malformed candidate: " + text);
          parsed.push_back(*c);
        }
        py::gil_scoped_release release;
        return dump(report::to_json(compare(s, parsed, newton(workers))));
      },
      py::arg("values"), py::arg("candidates"), py::arg("workers"));

  m.def("interarrival", [](const std::vector<std::string>& labels, const std::vector<double>& values,
                           double threshold) {
    if (labels.size() != values.size()) throw DomainError("labels and values differ in length");
    data::RawSeries raw;
    for (std::size_t i = 0; i < values.size(); ++i) raw.rows.push_back({labels[i], values[i]});
    return dump(report::to_json(data::interarrival(raw, threshold)));
  });
}
