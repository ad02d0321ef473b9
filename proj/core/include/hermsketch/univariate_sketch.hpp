#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hermsketch/running_moments.hpp"

namespace hermsketch {

enum class QuantileAlgorithm { kInterpolate, kBisection };

inline constexpr int kDefaultOrder = 30;
inline constexpr int kAccelerationRounds = 2;
inline constexpr double kPdfClipFloor = 1e-8;

// Iterated averaging of the partial sums S_0..S_N of a truncated series:
// each round replaces S_k by (S_k + S_{k+1})/2 and drops the last element,
// and the final element is returned. rounds = 0 returns S_N unchanged.
double accelerate_partial_sums(std::span<const double> partials,
                               int rounds = kAccelerationRounds);

// Streaming estimator of a univariate distribution. The state is the
// truncated coefficient vector a_0..a_N of the Hermite expansion of the
// density, each a_k a running (optionally exponentially weighted) average
// of h_k at the observations, plus the running moments used for
// standardization. Updates cost O(N) regardless of how much data the
// sketch has absorbed, and the state never grows.
//
// Queries reconstruct the density, distribution function and arbitrary
// quantiles from the coefficients alone. With exp_weight_lambda set the
// sketch forgets old data geometrically and tracks drifting streams;
// such sketches update strictly one observation at a time.
class UnivariateSketch {
 public:
  explicit UnivariateSketch(int order_n = kDefaultOrder, bool standardize = true,
                            std::optional<double> exp_weight_lambda = std::nullopt);

  int order_n() const noexcept { return order_n_; }
  bool standardize() const noexcept { return standardize_; }
  std::optional<double> exp_weight_lambda() const noexcept { return lambda_; }
  std::uint64_t count() const noexcept { return count_; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  const RunningMoments& moments() const noexcept { return moments_; }

  // One observation; in standardized mode the moments are advanced first
  // and the observation is centered and rescaled with the updated values.
  void update(double x);

  // A batch in one pass: batch moments are merged into the prior moments
  // exactly, every batch observation is standardized with the merged
  // values, and the batch coefficient average is blended with the prior
  // coefficients by observation count. Stationary sketches only.
  void update_batch(std::span<const double> xs);

  double pdf(double x, bool clipped = false, bool accelerate = true) const;
  std::vector<double> pdf(std::span<const double> xs, bool clipped = false,
                          bool accelerate = true) const;

  double cdf(double x, bool clipped = false, bool accelerate = true) const;
  std::vector<double> cdf(std::span<const double> xs, bool clipped = false,
                          bool accelerate = true) const;

  // Alternate distribution-function form used for quantile inversion: for
  // non-negative standardized arguments the upper-tail integrals are
  // summed and subtracted from one, which behaves better in the tails.
  double cdf_quantile_form(double x, bool accelerate = true) const;

  // Arbitrary quantiles, each p strictly inside (0, 1). kInterpolate
  // evaluates the distribution function on a fixed standardized grid,
  // repairs monotonicity by running maximum and interpolates; kBisection
  // root-finds per p. Requires at least two observations.
  std::vector<double> quantiles(std::span<const double> ps,
                                QuantileAlgorithm algorithm = QuantileAlgorithm::kInterpolate,
                                bool accelerate = true) const;
  double quantile(double p, QuantileAlgorithm algorithm = QuantileAlgorithm::kInterpolate,
                  bool accelerate = true) const;

  static UnivariateSketch restore(int order_n, bool standardize,
                                  std::optional<double> exp_weight_lambda,
                                  std::uint64_t count, RunningMoments moments,
                                  std::vector<double> coefficients);

 private:
  friend UnivariateSketch merge_sketches(std::span<const UnivariateSketch> sketches);

  // Standardized-coordinate evaluation of the quantile-form distribution
  // function; public queries map through the standardization affine.
  double quantform_std(double xs, bool accelerate) const;

  int order_n_ = kDefaultOrder;
  bool standardize_ = true;
  std::optional<double> lambda_;
  std::uint64_t count_ = 0;
  RunningMoments moments_;
  std::vector<double> coeffs_;
};

}  // namespace hermsketch
