#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cgseq/types.hpp"

namespace cgseq {

/// One trading day of (seconds-from-open, log-price) ticks.
struct TickSeries {
  std::string day;
  std::vector<double> timestamp;
  std::vector<double> log_price;

  std::size_t size() const { return log_price.size(); }
  bool operator==(const TickSeries&) const = default;
};

class ParseError : public InvalidInputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InvalidInputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestResult {
  std::vector<TickSeries> days;
  std::vector<std::string> warnings;
  std::size_t duplicates = 0;
};

inline constexpr const char* kTickHeader = "day,timestamp,log_price";

/// Reads `day,timestamp,log_price` rows. Lines starting with '#' are
/// comments. Rows are grouped by day in order of first appearance; within a
/// day timestamps must not decrease, and a repeated timestamp replaces the
/// previous tick (counted as a warning).
IngestResult parse_ticks(std::istream& in);
IngestResult ingest_csv(const std::filesystem::path& path);

void write_ticks(std::ostream& out, std::span<const TickSeries> days, std::span<const std::string> comments = {});
void write_csv(const std::filesystem::path& path, std::span<const TickSeries> days,
               std::span<const std::string> comments = {});

/// Shortest-round-trip-safe text form used in every output file (%.17g).
std::string format_double(double v);

}  // namespace cgseq
