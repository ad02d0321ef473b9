#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace hermsketch {

// Online mean and spread for sequential standardization. Cumulative mode
// keeps the one-pass (Welford) mean and sum of squared deviations m2;
// exponential mode keeps geometrically down-weighted analogues, with the
// squared deviation taken against the pre-update mean.
class RunningMoments {
 public:
  RunningMoments() = default;  // cumulative
  static RunningMoments exponential(double lambda);

  void update(double x);

  bool exponential_mode() const noexcept { return lambda_.has_value(); }
  std::optional<double> lambda() const noexcept { return lambda_; }
  std::uint64_t count() const noexcept { return count_; }

  // Exponentially weighted mean in exponential mode.
  double mean() const noexcept { return mean_; }
  // Sum of squared deviations (cumulative) or weighted variance (exponential).
  double spread() const noexcept { return spread_; }

  // Sample variance m2/(count-1), or the weighted variance; 0 while undefined.
  double variance() const noexcept;

  // Standardization affine: scale falls back to 1 while the deviation is
  // degenerate (fewer than two observations, or all identical).
  double center() const noexcept { return count_ ? mean_ : 0.0; }
  double scale() const noexcept;

  static RunningMoments restore(std::optional<double> lambda, std::uint64_t count,
                                double mean, double spread);

 private:
  std::optional<double> lambda_;
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double spread_ = 0.0;
};

// Exact combination of cumulative states: the result carries the count,
// mean and m2 of the concatenated data. Exponential states do not merge.
RunningMoments merge_moments(std::span<const RunningMoments> states);

}  // namespace hermsketch
