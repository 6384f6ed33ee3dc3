#include "cgseq/tick_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

namespace cgseq {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view field, const char* name, std::size_t line) {
  field = trim(field);
  double v = 0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError(std::string("malformed ") + name + " '" + std::string(field) + "'", line);
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + name, line);
  return v;
}

}  // namespace

IngestResult parse_ticks(std::istream& in) {
  IngestResult result;
  std::unordered_map<std::string, std::size_t> index;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;

  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != kTickHeader)
        throw ParseError("expected header '" + std::string(kTickHeader) + "'", line);
      header_seen = true;
      continue;
    }
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos)
      throw ParseError("expected 3 comma-separated fields", line);
    const std::string day(trim(text.substr(0, c1)));
    if (day.empty()) throw ParseError("empty day identifier", line);
    const double ts = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "timestamp", line);
    const double lp = parse_number(text.substr(c2 + 1), "log_price", line);

    auto [it, inserted] = index.try_emplace(day, result.days.size());
    if (inserted) result.days.push_back(TickSeries{day, {}, {}});
    auto& series = result.days[it->second];
    if (!series.timestamp.empty()) {
      const double last = series.timestamp.back();
      if (ts == last) {
        series.log_price.back() = lp;
        ++result.duplicates;
        result.warnings.push_back("line " + std::to_string(line) + ": duplicate timestamp in day " + day +
                                  ", keeping last");
        continue;
      }
      if (ts < last) throw ParseError("timestamps decrease within day " + day, line);
    }
    series.timestamp.push_back(ts);
    series.log_price.push_back(lp);
  }
  if (!header_seen) result.warnings.push_back("empty input: no header and no rows");
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_ticks(in);
}

std::string format_double(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_ticks(std::ostream& out, std::span<const TickSeries> days, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << kTickHeader << '\n';
  for (const auto& d : days) {
    if (d.timestamp.size() != d.log_price.size()) throw DimensionMismatch("tick series columns differ in length");
    for (std::size_t i = 0; i < d.size(); ++i)
      out << d.day << ',' << format_double(d.timestamp[i]) << ',' << format_double(d.log_price[i]) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, std::span<const TickSeries> days,
               std::span<const std::string> comments) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_ticks(out, days, comments);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace cgseq
