#pragma once

#include <string>
#include <variant>

#include "hermsketch/bivariate_sketch.hpp"
#include "hermsketch/univariate_sketch.hpp"

namespace hermsketch {

inline constexpr int kSketchFormatVersion = 1;

using AnySketch = std::variant<UnivariateSketch, BivariateSketch>;

// Self-describing JSON document. Reals are written with enough digits to
// round-trip bit for bit; deserialize(serialize(s)) restores every field
// exactly. Throws data_error on version or shape mismatches and on
// non-finite payload values.
std::string serialize(const UnivariateSketch& sketch);
std::string serialize(const BivariateSketch& sketch);
std::string serialize(const AnySketch& sketch);

AnySketch deserialize(const std::string& text);

AnySketch load_sketch(const std::string& path);
void save_sketch(const std::string& path, const AnySketch& sketch);

}  // namespace hermsketch
