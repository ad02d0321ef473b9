#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace hermsketch::eval {

using Rng = std::mt19937_64;

// Uniform draw strictly inside (0, 1), identical on every platform.
double uniform01(Rng& rng);

// Standard normal quantile and distribution function, accurate to a few
// ulps; the quantile uses a rational seed refined by one Halley step.
double normal_quantile(double p);
double normal_cdf(double x);

// An exact reference distribution: closed-form quantile and distribution
// function plus an inverse-transform sampler driven by the shared Rng.
struct TestDistribution {
  std::string name;
  std::function<double(double)> quantile;  // p in (0,1) -> x
  std::function<double(double)> cdf;       // x -> p
  std::function<double(Rng&)> sample;
};

// Standard normal, logistic(0,1), exponential(1), uniform(0,1): full-line,
// half-line and compact support.
const std::vector<TestDistribution>& test_distributions();
const TestDistribution& test_distribution(const std::string& name);

// Correlated standard-normal pairs, y = rho x + sqrt(1-rho^2) z.
std::vector<std::array<double, 2>> sample_bivariate_normal(std::size_t n, double rho,
                                                           std::uint64_t seed);

}  // namespace hermsketch::eval
