#include "hermsketch/distributions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hermsketch::eval {

double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation for the normal quantile.
double normal_quantile_seed(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must be inside (0, 1)");
  }
  double x = normal_quantile_seed(p);
  // One Halley step against the exact distribution function.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

const std::vector<TestDistribution>& test_distributions() {
  static const std::vector<TestDistribution> dists = {
      {"normal", [](double p) { return normal_quantile(p); },
       [](double x) { return normal_cdf(x); },
       [](Rng& r) { return normal_quantile(uniform01(r)); }},
      {"logistic", [](double p) { return std::log(p / (1.0 - p)); },
       [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
       [](Rng& r) {
         const double u = uniform01(r);
         return std::log(u / (1.0 - u));
       }},
      {"exponential", [](double p) { return -std::log1p(-p); },
       [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); },
       [](Rng& r) { return -std::log1p(-uniform01(r)); }},
      {"uniform", [](double p) { return p; },
       [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); },
       [](Rng& r) { return uniform01(r); }},
  };
  return dists;
}

const TestDistribution& test_distribution(const std::string& name) {
  for (const auto& d : test_distributions()) {
    if (d.name == name) return d;
  }
  throw std::invalid_argument("test_distribution: unknown distribution '" + name + "'");
}

std::vector<std::array<double, 2>> sample_bivariate_normal(std::size_t n, double rho,
                                                           std::uint64_t seed) {
  if (!(rho > -1.0) || !(rho < 1.0)) {
    throw std::invalid_argument("sample_bivariate_normal: rho must be inside (-1, 1)");
  }
  if (n < 1) throw std::invalid_argument("sample_bivariate_normal: n must be positive");
  Rng rng(seed);
  const double tail = std::sqrt(1.0 - rho * rho);
  std::vector<std::array<double, 2>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = normal_quantile(uniform01(rng));
    const double z = normal_quantile(uniform01(rng));
    out.push_back({x, rho * x + tail * z});
  }
  return out;
}

}  // namespace hermsketch::eval
