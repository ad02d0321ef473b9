#pragma once

#include <stdexcept>
#include <string>

namespace hermsketch {

// Malformed or inconsistent external input: text streams, sketch files.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Sketches whose configurations cannot be combined (merge, cross-file use).
class incompatible_sketch_error : public std::runtime_error {
 public:
  explicit incompatible_sketch_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace hermsketch
