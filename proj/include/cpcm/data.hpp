#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "cpcm/likelihood.hpp"

namespace cpcm::data {

struct RawRow {
  std::string label;
  double value;
};

struct RawSeries {
  std::vector<RawRow> rows;
  std::string source;

  /// Throws ObservationError when a value is not positive.
  Series to_series() const;
};

struct CsvOptions {
  std::string label_column = "date";
  std::string value_column = "value";
};

/// RFC 4180 input with a header row. Throws IOError when the file cannot be
/// read and ParseError(row, column) for a bad header or a non-finite value.
/// Rows are numbered from 1 with the header as row 1.
RawSeries read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
RawSeries parse_csv(std::istream& in, const CsvOptions& options = {}, std::string source = {});

struct InterarrivalEvent {
  std::string label;  ///< label of the exceeding row
  std::size_t row;    ///< 1-based data row
  long waiting;       ///< T, rows since the previous exceedance
};

struct InterarrivalSeries {
  std::vector<InterarrivalEvent> events;
  long trailing = 0;  ///< rows after the last exceedance
};

/// Counter state threaded through a scan, so blocks can be processed in turn.
struct InterarrivalScan {
  double threshold;
  long counter = 0;
  std::size_t rows_seen = 0;

  /// Appends the events found in `rows` to `out`.
  void feed(std::span<const RawRow> rows, std::vector<InterarrivalEvent>& out);
};

/// Rows with value > threshold (strict) end an interval; T counts rows since
/// the series start or the previous exceedance, the exceeding row included.
InterarrivalSeries interarrival(const RawSeries& raw, double threshold);

/// Writes `contents` through a temporary file renamed over `path`.
/// Throws IOError.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace cpcm::data
