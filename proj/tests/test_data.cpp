#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cpcm/error.hpp"
#include "cpcm/report.hpp"
#include "cpcm/simulate.hpp"

using namespace cpcm;
using copula::Family;
using weibull::WeibullParams;
namespace fs = std::filesystem;

namespace {

data::RawSeries parse(const std::string& text) {
  std::istringstream in(text);
  return data::parse_csv(in);
}

data::RawSeries rows(std::initializer_list<double> values) {
  data::RawSeries raw;
  int i = 0;
  for (double v : values) raw.rows.push_back({"d" + std::to_string(++i), v});
  return raw;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("cpcm_test_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FitResult small_fit(const Series& s) { return profile_fit(s, Family::Clayton, 2.0, NewtonConfig{}); }

Series small_series() {
  const ModelParams truth{WeibullParams(1.8, 1.2), WeibullParams(2.1, 1.5), 2, 2, 2,
                          Family::Clayton};
  return gen_series(truth, ChangePoint(10, 20), 20, 3);
}

}  // namespace

TEST(ParseCsv, TwoRows) {
  const auto raw = parse("date,value\n2020-01-02,12.5\n2020-01-03,13.1");
  ASSERT_EQ(raw.rows.size(), 2u);
  EXPECT_EQ(raw.rows[0].label, "2020-01-02");
  EXPECT_EQ(raw.rows[1].value, 13.1);
}

TEST(ParseCsv, QuotingBomCrlfAndColumnOrder) {
  const auto raw = parse("\xEF\xBB\xBFvalue,note,date\r\n\"1.5\",\"a, \"\"b\"\"\",x\r\n\r\n2,\"multi\nline\",y\r\n");
  ASSERT_EQ(raw.rows.size(), 2u);
  EXPECT_EQ(raw.rows[0].label, "x");
  EXPECT_EQ(raw.rows[0].value, 1.5);
  EXPECT_EQ(raw.rows[1].label, "y");
}

TEST(ParseCsv, CustomColumns) {
  std::istringstream in("Date,Close\n2020-01-02,14\n");
  const auto raw = data::parse_csv(in, {"Date", "Close"});
  ASSERT_EQ(raw.rows.size(), 1u);
  EXPECT_EQ(raw.rows[0].value, 14.0);
}

TEST(ParseCsv, Errors) {
  try {
    parse("2020-01-02,12.5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
  try {
    parse("date,value\n2020-01-02,1\n2020-01-03,NaN\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 2u);
  }
  EXPECT_THROW(parse("date,value\n2020-01-02,inf\n"), ParseError);
  EXPECT_THROW(parse("date,value\n2020-01-02,1.2.3\n"), ParseError);
  EXPECT_THROW(parse("date,value\n2020-01-02\n"), ParseError);
  EXPECT_THROW(parse("date,value\n\"unterminated,1\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(data::read_csv(temp_path("does_not_exist.csv")), IOError);
}

TEST(ParseCsv, HeaderOnlyIsEmpty) { EXPECT_TRUE(parse("date,value\n").rows.empty()); }

TEST(Interarrival, HandTracedExample) {
  const auto s = data::interarrival(rows({10, 35, 12, 11, 40}), 30);
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].row, 2u);
  EXPECT_EQ(s.events[0].waiting, 2);
  EXPECT_EQ(s.events[1].row, 5u);
  EXPECT_EQ(s.events[1].waiting, 3);
  EXPECT_EQ(s.trailing, 0);
}

TEST(Interarrival, ConsecutiveAndStrictThreshold) {
  const auto s = data::interarrival(rows({31, 32, 30, 29, 33, 1}), 30);
  ASSERT_EQ(s.events.size(), 3u);
  EXPECT_EQ(s.events[0].waiting, 1);
  EXPECT_EQ(s.events[1].waiting, 1);
  EXPECT_EQ(s.events[2].waiting, 3);
  EXPECT_EQ(s.trailing, 1);
  EXPECT_TRUE(data::interarrival(rows({}), 30).events.empty());
  EXPECT_THROW(data::interarrival(rows({1}), NAN), DomainError);
}

TEST(Interarrival, FoldOverBlocksAndConservation) {
  data::RawSeries raw;
  std::uint64_t state = 12345;
  for (int i = 0; i < 500; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    raw.rows.push_back({std::to_string(i), static_cast<double>(state >> 40) / (1 << 24) * 40});
  }
  const auto whole = data::interarrival(raw, 30);
  long total = whole.trailing;
  for (const auto& e : whole.events) {
    EXPECT_GE(e.waiting, 1);
    total += e.waiting;
  }
  EXPECT_EQ(total, 500);

  for (std::size_t cut : {0u, 1u, 137u, 499u, 500u}) {
    data::InterarrivalScan scan{30};
    std::vector<data::InterarrivalEvent> events;
    const std::span<const data::RawRow> all(raw.rows);
    scan.feed(all.subspan(0, cut), events);
    scan.feed(all.subspan(cut), events);
    ASSERT_EQ(events.size(), whole.events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      EXPECT_EQ(events[i].row, whole.events[i].row);
      EXPECT_EQ(events[i].waiting, whole.events[i].waiting);
    }
    EXPECT_EQ(scan.counter, whole.trailing);
  }
}

TEST(WriteAtomic, ReplacesAndLeavesNoTemp) {
  const fs::path p = temp_path("atomic.txt");
  data::write_atomic(p, "first");
  data::write_atomic(p, "second");
  EXPECT_EQ(slurp(p), "second");
  for (const auto& entry : fs::directory_iterator(p.parent_path())) {
    EXPECT_EQ(entry.path().string().find(p.filename().string() + ".tmp"), std::string::npos);
  }
  fs::remove(p);
  EXPECT_THROW(data::write_atomic(temp_path("missing_dir") / "x.txt", "x"), IOError);
}

TEST(Report, FitJsonRoundTrip) {
  const Series s = small_series();
  FitResult fit = small_fit(s);
  fit.profile[0].loglik = -INFINITY;  // a failed profile point
  const auto j = report::to_json(fit);
  const auto back = report::fit_from_json(report::ordered_json::parse(j.dump()), s.size());
  EXPECT_EQ(report::to_json(back), j);
  EXPECT_EQ(back.params.gamma0.shape(), fit.params.gamma0.shape());
  EXPECT_EQ(back.loglik, fit.loglik);
  EXPECT_TRUE(std::isinf(back.profile[0].loglik));
  EXPECT_EQ(back.cp, fit.cp);

  const fs::path p = temp_path("fit.json");
  report::write_report(fit, p, report::Format::Json);
  EXPECT_EQ(report::ordered_json::parse(slurp(p)), j);
  fs::remove(p);
}

TEST(Report, FitCsvAndMarkdown) {
  const Series s = small_series();
  const FitResult fit = small_fit(s);
  const std::string csv = report::render(fit, report::Format::Csv);
  EXPECT_EQ(csv.rfind("parameter,value\ntau," + std::to_string(fit.cp.tau()) + "\n", 0), 0u);
  const std::string md = report::render(fit, report::Format::Markdown);
  EXPECT_NE(md.find("| Parameter | Estimation |"), std::string::npos);

  const std::string profile = report::profile_csv(fit);
  EXPECT_EQ(std::count(profile.begin(), profile.end(), '\n'), static_cast<long>(fit.profile.size() + 1));
  const std::string annotated = report::annotated_series_csv(s, fit);
  std::istringstream lines(annotated);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,label,value,regime");
  int row = 0;
  while (std::getline(lines, line)) {
    ++row;
    EXPECT_EQ(line.back(), row <= fit.cp.tau() ? '0' : '1');
  }
  EXPECT_EQ(row, 20);
}

TEST(Report, StudyMarkdownColumns) {
  StudyConfig cfg{"demo", {WeibullParams(1.8, 1.2), WeibullParams(2.1, 1.5), 2, 2, 2, Family::Clayton},
                  10, 20, 2, 2.0, Family::Clayton, 5};
  const StudyReport r = run_study(cfg);
  const std::string md = report::render(std::vector<StudyReport>{r}, report::Format::Markdown);
  EXPECT_NE(md.find("| Parameter | True value | Ê | RMSE | RE |"), std::string::npos);
  const std::string csv = report::render(std::vector<StudyReport>{r}, report::Format::Csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}

TEST(Report, BootstrapCsvHasTauRow) {
  BootstrapResult r{};
  for (auto& iv : r.intervals) iv = {0.5, 1.5};
  r.tau_interval = {48, 52};
  r.replications = 10;
  r.level = 0.95;
  const std::string csv = report::render(r, report::Format::Csv);
  EXPECT_EQ(csv,
            "parameter,lo,hi\nk0,0.5,1.5\nk1,0.5,1.5\nlambda0,0.5,1.5\nlambda1,0.5,1.5\n"
            "alpha0,0.5,1.5\nalpha1,0.5,1.5\ntau,48,52\n");
}

TEST(Report, ComparisonMarkdownColumns) {
  const Series s = small_series();
  const auto cmp = compare(s, {{Family::Clayton, 2.0}}, NewtonConfig{});
  const std::string md = report::render(cmp, report::Format::Markdown);
  EXPECT_NE(md.find("Parameter | Estimation | 95% CI | AIC"), std::string::npos);
  const auto j = report::to_json(cmp);
  EXPECT_EQ(j["winner"], 0);
}

TEST(Report, FormatNames) {
  EXPECT_EQ(report::parse_format("json"), report::Format::Json);
  EXPECT_EQ(report::parse_format("md"), report::Format::Markdown);
  EXPECT_FALSE(report::parse_format("xml"));
}
