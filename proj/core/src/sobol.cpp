#include "hermsketch/sobol.hpp"

namespace hermsketch::eval {

double SobolSequence::next() {
  // Gray-code stepping; for the first dimension every direction number is
  // a single bit, v_c = 2^(63-c) for the rightmost zero bit c of the index.
  std::uint64_t i = index_++;
  int c = 0;
  while (i & 1) {
    i >>= 1;
    ++c;
  }
  state_ ^= 1ULL << (63 - c);
  return static_cast<double>(state_ >> 11) * 0x1.0p-53;
}

std::vector<double> sobol_points(std::size_t count) {
  SobolSequence seq;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(seq.next());
  return out;
}

}  // namespace hermsketch::eval
