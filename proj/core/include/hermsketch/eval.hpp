#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hermsketch/distributions.hpp"
#include "hermsketch/univariate_sketch.hpp"

namespace hermsketch::eval {

inline constexpr int kDefaultQmcPoints = 2048;

// Quantile error integrals against an exact reference, estimated by
// quasi-Monte Carlo over a Sobol point set: iae averages |qhat(p) - q(p)|
// over (0, 1) and piae over (0.01, 0.99), both normalized per unit of
// cumulative probability.
struct IaeResult {
  double iae = 0.0;
  double piae = 0.0;
};

using QuantileFn = std::function<std::vector<double>(std::span<const double>)>;

IaeResult iae_measures(const QuantileFn& estimated_quantiles, const TestDistribution& dist,
                       int qmc_points = kDefaultQmcPoints);
IaeResult iae_measures(const UnivariateSketch& sketch, const TestDistribution& dist,
                       int qmc_points = kDefaultQmcPoints);

struct StudyResult {
  std::string name;
  std::uint64_t sample_size = 0;
  int replications = 0;
  double miae = 0.0;       // quantile studies: mean IAE across replications
  double pmiae = 0.0;      // quantile studies: mean pIAE across replications
  double mae = 0.0;        // correlation studies: mean absolute error
  double error_std = 0.0;  // std of the per-replication error measure
};

// Repeated sample -> batch sketch -> quantile error, per distribution.
std::vector<StudyResult> quantile_iae_study(std::span<const TestDistribution> dists,
                                            std::uint64_t n, int replications, int order_n,
                                            int qmc_points, std::uint64_t seed);

// Repeated bivariate-normal sample -> batch sketch -> rank-correlation
// error. Spearman truth is the exact-rank sample coefficient of each draw;
// Kendall truth is (2/pi) asin(rho). The aggregate averages the per-rho
// MAE values and reports their spread.
struct CorrelationStudy {
  std::vector<StudyResult> spearman;  // one entry per rho
  std::vector<StudyResult> kendall;
  double spearman_mae_avg = 0.0;
  double spearman_mae_std = 0.0;
  double kendall_mae_avg = 0.0;
  double kendall_mae_std = 0.0;
};

CorrelationStudy correlation_mae_study(std::uint64_t n, std::span<const double> rhos,
                                       int replications, int order_n, std::uint64_t seed);

// Exact-rank sample Spearman coefficient (average ranks on ties).
double sample_spearman(std::span<const std::array<double, 2>> data);

}  // namespace hermsketch::eval
