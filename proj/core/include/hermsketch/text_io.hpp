#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hermsketch {

enum class BadLinePolicy { kSkip, kFail };

// Line-oriented numeric ingestion: one observation per line, fields
// separated by commas or whitespace. Blank lines are ignored. A line with
// the wrong field count, unparseable text or a non-finite value is "bad":
// kSkip counts it, kFail throws data_error with the line number.
struct UnivariateStream {
  std::vector<double> values;
  std::uint64_t skipped_lines = 0;
};

struct BivariateStream {
  std::vector<std::array<double, 2>> values;
  std::uint64_t skipped_lines = 0;
};

UnivariateStream ingest_univariate(std::istream& source, BadLinePolicy policy);
BivariateStream ingest_bivariate(std::istream& source, BadLinePolicy policy);

}  // namespace hermsketch
