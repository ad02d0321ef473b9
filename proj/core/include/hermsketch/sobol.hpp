#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hermsketch::eval {

// First dimension of the Sobol sequence (the binary radical inverse),
// starting from index 1 so no point is exactly 0. Values lie in (0, 1).
class SobolSequence {
 public:
  double next();

 private:
  std::uint64_t index_ = 0;
  std::uint64_t state_ = 0;
};

std::vector<double> sobol_points(std::size_t count);

}  // namespace hermsketch::eval
