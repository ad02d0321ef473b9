#include "hermsketch/text_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>

#include "hermsketch/errors.hpp"

namespace hermsketch {

namespace {

bool is_separator(char c) { return c == ',' || c == ' ' || c == '\t'; }

// Splits into at most max_fields+1 tokens and parses each as a finite
// double. Returns the field count, or -1 when the line is malformed.
int parse_fields(std::string_view line, double* out, int max_fields) {
  int count = 0;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_separator(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_separator(line[end])) ++end;
    if (count >= max_fields) return -1;
    const char* first = line.data() + pos;
    const char* last = line.data() + end;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return -1;
    out[count++] = v;
    pos = end;
  }
  return count;
}

template <typename Push>
std::uint64_t ingest_lines(std::istream& source, BadLinePolicy policy, int columns, Push push) {
  std::uint64_t skipped = 0;
  std::uint64_t line_number = 0;
  std::string line;
  double fields[2];
  while (std::getline(source, line)) {
    ++line_number;
    std::string_view v = line;
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    const int n = parse_fields(v, fields, columns);
    if (n == 0) continue;  // blank line
    if (n != columns) {
      if (policy == BadLinePolicy::kFail) {
        throw data_error("input line " + std::to_string(line_number) + ": expected " +
                         std::to_string(columns) + " numeric field(s), got '" + std::string(v) + "'");
      }
      ++skipped;
      continue;
    }
    push(fields);
  }
  return skipped;
}

}  // namespace

UnivariateStream ingest_univariate(std::istream& source, BadLinePolicy policy) {
  UnivariateStream out;
  out.skipped_lines = ingest_lines(source, policy, 1,
                                   [&](const double* f) { out.values.push_back(f[0]); });
  return out;
}

BivariateStream ingest_bivariate(std::istream& source, BadLinePolicy policy) {
  BivariateStream out;
  out.skipped_lines = ingest_lines(source, policy, 2,
                                   [&](const double* f) { out.values.push_back({f[0], f[1]}); });
  return out;
}

}  // namespace hermsketch
