#include "cpcm/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "cpcm/error.hpp"

namespace cpcm::data {

namespace {

// Splits one CSV record. Quoted fields may contain commas, doubled quotes and
// line breaks; `line` is extended from `in` until the record is complete.
std::vector<std::string> split_record(std::string line, std::istream& in, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (!quoted) break;
      std::string more;
      if (!std::getline(in, more)) throw ParseError(row, fields.size() + 1, "unterminated quote");
      line += '\n';
      line += more;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_value(const std::string& text, std::size_t row, std::size_t column) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(row, column, "not a number: '" + text + "'");
  }
  if (!std::isfinite(v)) throw ParseError(row, column, "value is not finite: '" + text + "'");
  return v;
}

}  // namespace

Series RawSeries::to_series() const {
  std::vector<double> values;
  std::vector<std::string> labels;
  values.reserve(rows.size());
  labels.reserve(rows.size());
  for (const auto& r : rows) {
    values.push_back(r.value);
    labels.push_back(r.label);
  }
  return Series(std::move(values), std::move(labels));
}

RawSeries parse_csv(std::istream& in, const CsvOptions& options, std::string source) {
  RawSeries out{{}, std::move(source)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, 1, "missing header row");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_record(line, in, 1);
  std::size_t label_col = header.size(), value_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == options.label_column) label_col = i;
    if (name == options.value_column) value_col = i;
  }
  if (label_col == header.size() || value_col == header.size()) {
    throw ParseError(1, 1, "header must name columns '" + options.label_column + "' and '" +
                               options.value_column + "'");
  }

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, in, row);
    if (fields.size() <= std::max(label_col, value_col)) {
      throw ParseError(row, fields.size() + 1, "too few columns");
    }
    out.rows.push_back({trim(fields[label_col]), parse_value(fields[value_col], row, value_col + 1)});
  }
  return out;
}

RawSeries read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path.string());
  return parse_csv(in, options, path.string());
}

void InterarrivalScan::feed(std::span<const RawRow> rows, std::vector<InterarrivalEvent>& out) {
  for (const RawRow& r : rows) {
    ++rows_seen;
    ++counter;
    if (r.value > threshold) {
      out.push_back({r.label, rows_seen, counter});
      counter = 0;
    }
  }
}

InterarrivalSeries interarrival(const RawSeries& raw, double threshold) {
  if (!std::isfinite(threshold)) throw DomainError("threshold must be finite");
  InterarrivalScan scan{threshold};
  InterarrivalSeries out;
  scan.feed(raw.rows, out.events);
  out.trailing = scan.counter;
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IOError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IOError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace cpcm::data
