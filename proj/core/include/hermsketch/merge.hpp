#pragma once

#include <span>

#include "hermsketch/bivariate_sketch.hpp"
#include "hermsketch/univariate_sketch.hpp"

namespace hermsketch {

// Combine sketches built on disjoint shards of one data set. All inputs
// must share order and standardize flag and be stationary. Without
// standardization the merge is a count-weighted coefficient average and
// reproduces the full-data sketch exactly; with standardization the
// moments merge exactly and each shard's coefficients are re-expressed in
// the merged standardization by Gauss-Hermite quadrature against the
// shard's own density estimate, which is approximate.
UnivariateSketch merge_sketches(std::span<const UnivariateSketch> sketches);
BivariateSketch merge_sketches(std::span<const BivariateSketch> sketches);

}  // namespace hermsketch
