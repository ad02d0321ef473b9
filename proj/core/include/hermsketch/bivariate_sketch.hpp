#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hermsketch/running_moments.hpp"

namespace hermsketch {

// Streaming estimator of a bivariate distribution. The state is the
// (N+1)x(N+1) coefficient matrix A, a running average of the outer
// products h(x) (x) h(y), together with the two marginal coefficient
// vectors and per-axis moments. The marginals are kept inside the sketch
// because the rank-correlation forms combine them with A over the same
// stream and the same standardization.
//
// Spearman Rho and Kendall Tau are read off the coefficients through the
// precomputed W matrix and z vector as bilinear and quadratic forms; no
// pass over the data is ever needed.
class BivariateSketch {
 public:
  explicit BivariateSketch(int order_n = 30, bool standardize = true,
                           std::optional<double> exp_weight_lambda = std::nullopt);

  int order_n() const noexcept { return order_n_; }
  bool standardize() const noexcept { return standardize_; }
  std::optional<double> exp_weight_lambda() const noexcept { return lambda_; }
  std::uint64_t count() const noexcept { return count_; }

  // Row-major (order_n+1)^2; entry (k, j) weighs h_k(x) h_j(y).
  const std::vector<double>& coefficient_matrix() const noexcept { return coeff_; }
  const std::vector<double>& marginal_x() const noexcept { return marginal_x_; }
  const std::vector<double>& marginal_y() const noexcept { return marginal_y_; }
  const RunningMoments& moments_x() const noexcept { return moments_x_; }
  const RunningMoments& moments_y() const noexcept { return moments_y_; }

  void update(double x, double y);
  void update_batch(std::span<const std::array<double, 2>> pairs);

  double pdf(double x, double y, bool clipped = false) const;
  std::vector<double> pdf(std::span<const std::array<double, 2>> points,
                          bool clipped = false) const;

  double cdf(double x, double y, bool clipped = false) const;
  std::vector<double> cdf(std::span<const std::array<double, 2>> points,
                          bool clipped = false) const;

  // Rank correlations from the coefficient state; clamped to [-1, 1].
  // Require at least two observations.
  double spearman() const;
  double kendall() const;

  static BivariateSketch restore(int order_n, bool standardize,
                                 std::optional<double> exp_weight_lambda, std::uint64_t count,
                                 RunningMoments moments_x, RunningMoments moments_y,
                                 std::vector<double> coefficient_matrix,
                                 std::vector<double> marginal_x, std::vector<double> marginal_y);

 private:
  friend BivariateSketch merge_sketches(std::span<const BivariateSketch> sketches);

  int order_n_ = 30;
  bool standardize_ = true;
  std::optional<double> lambda_;
  std::uint64_t count_ = 0;
  RunningMoments moments_x_;
  RunningMoments moments_y_;
  std::vector<double> coeff_;
  std::vector<double> marginal_x_;
  std::vector<double> marginal_y_;
};

}  // namespace hermsketch
