#include "hermsketch/univariate_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hermsketch/hermite_basis.hpp"

namespace hermsketch {

namespace {

// Fixed interpolation grid in standardized coordinates.
constexpr double kGridLo = -5.0;
constexpr double kGridHi = 5.0;
constexpr int kGridPoints = 1001;

// Bisection bracket and stopping width, standardized coordinates.
constexpr double kBracketLo = -10.0;
constexpr double kBracketHi = 10.0;
constexpr double kBisectTol = 1e-10;
constexpr int kBisectMaxIter = 200;

// Inner clamp applied to distribution-function values during inversion.
constexpr double kCdfEps = 1e-10;

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

void check_lambda(const std::optional<double>& lambda) {
  if (lambda && (!(*lambda > 0.0) || !(*lambda <= 1.0))) {
    throw std::invalid_argument("UnivariateSketch: exp_weight_lambda must be in (0, 1]");
  }
}

void check_order(int order_n) {
  if (order_n < 0 || order_n > kMaxHermiteOrder) {
    throw std::invalid_argument("UnivariateSketch: order must be in [0, " +
                                std::to_string(kMaxHermiteOrder) + "]");
  }
}

}  // namespace

double accelerate_partial_sums(std::span<const double> partials, int rounds) {
  if (partials.empty()) {
    throw std::invalid_argument("accelerate_partial_sums: empty input");
  }
  if (rounds < 0) {
    throw std::invalid_argument("accelerate_partial_sums: rounds must be non-negative");
  }
  // Only the last rounds+1 partial sums can influence the result.
  std::size_t len = std::min<std::size_t>(partials.size(), static_cast<std::size_t>(rounds) + 1);
  double stack_buf[128];
  std::vector<double> heap_buf;
  double* buf = stack_buf;
  if (len > std::size(stack_buf)) {
    heap_buf.resize(len);
    buf = heap_buf.data();
  }
  std::copy(partials.end() - static_cast<std::ptrdiff_t>(len), partials.end(), buf);
  for (int r = 0; r < rounds && len > 1; ++r) {
    for (std::size_t i = 0; i + 1 < len; ++i) buf[i] = 0.5 * (buf[i] + buf[i + 1]);
    --len;
  }
  return buf[len - 1];
}

UnivariateSketch::UnivariateSketch(int order_n, bool standardize,
                                   std::optional<double> exp_weight_lambda)
    : order_n_(order_n), standardize_(standardize), lambda_(exp_weight_lambda) {
  check_order(order_n);
  check_lambda(lambda_);
  if (lambda_) moments_ = RunningMoments::exponential(*lambda_);
  coeffs_.assign(static_cast<std::size_t>(order_n_) + 1, 0.0);
}

void UnivariateSketch::update(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("UnivariateSketch::update: observation must be finite");
  }
  moments_.update(x);
  const double xs = standardize_ ? (x - moments_.center()) / moments_.scale() : x;
  double h[kMaxHermiteOrder + 1];
  hermite_function_values(xs, order_n_, h);
  const std::size_t m = coeffs_.size();
  if (lambda_) {
    if (count_ == 0) {
      std::copy(h, h + m, coeffs_.begin());
    } else {
      const double l = *lambda_;
      for (std::size_t k = 0; k < m; ++k) coeffs_[k] += l * (h[k] - coeffs_[k]);
    }
  } else {
    const double inv = 1.0 / static_cast<double>(count_ + 1);
    for (std::size_t k = 0; k < m; ++k) coeffs_[k] += (h[k] - coeffs_[k]) * inv;
  }
  ++count_;
}

void UnivariateSketch::update_batch(std::span<const double> xs) {
  if (lambda_) {
    throw std::invalid_argument(
        "UnivariateSketch::update_batch: exponentially weighted sketches update sequentially");
  }
  if (xs.empty()) {
    throw std::invalid_argument("UnivariateSketch::update_batch: empty batch");
  }
  RunningMoments batch;
  for (double x : xs) batch.update(x);  // rejects non-finite entries

  const RunningMoments states[] = {moments_, batch};
  const RunningMoments merged = merge_moments(states);
  const double center = standardize_ ? merged.center() : 0.0;
  const double scale = standardize_ ? merged.scale() : 1.0;

  const std::size_t m = coeffs_.size();
  std::vector<long double> acc(m, 0.0L);
  double h[kMaxHermiteOrder + 1];
  for (double x : xs) {
    hermite_function_values((x - center) / scale, order_n_, h);
    for (std::size_t k = 0; k < m; ++k) acc[k] += h[k];
  }
  const long double total = static_cast<long double>(count_) + xs.size();
  const long double prior = static_cast<long double>(count_);
  for (std::size_t k = 0; k < m; ++k) {
    coeffs_[k] = static_cast<double>((prior * coeffs_[k] + acc[k]) / total);
  }
  moments_ = merged;
  count_ += xs.size();
}

namespace {

struct Frame {
  double center;
  double scale;
};

Frame frame_of(bool standardize, const RunningMoments& m) {
  if (!standardize) return {0.0, 1.0};
  return {m.center(), m.scale()};
}

void check_nonempty(std::uint64_t count, const char* who) {
  if (count == 0) throw std::invalid_argument(std::string(who) + ": sketch is empty");
}

void check_query_point(double x, const char* who) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": query point must be finite");
}

// Partial sums of sum_k a_k * term_k, optionally accelerated.
double series_value(std::span<const double> coeffs, const double* terms, bool accelerate) {
  double partials[kMaxHermiteOrder + 1];
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    s += coeffs[k] * terms[k];
    partials[k] = s;
  }
  if (!accelerate) return s;
  return accelerate_partial_sums(std::span<const double>(partials, coeffs.size()));
}

}  // namespace

double UnivariateSketch::pdf(double x, bool clipped, bool accelerate) const {
  check_nonempty(count_, "UnivariateSketch::pdf");
  check_query_point(x, "UnivariateSketch::pdf");
  const Frame f = frame_of(standardize_, moments_);
  double terms[kMaxHermiteOrder + 1];
  hermite_function_values((x - f.center) / f.scale, order_n_, terms);
  double v = series_value(coeffs_, terms, accelerate) / f.scale;
  if (clipped) v = std::max(v, kPdfClipFloor);
  return v;
}

std::vector<double> UnivariateSketch::pdf(std::span<const double> xs, bool clipped,
                                          bool accelerate) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(pdf(x, clipped, accelerate));
  return out;
}

double UnivariateSketch::cdf(double x, bool clipped, bool accelerate) const {
  check_nonempty(count_, "UnivariateSketch::cdf");
  check_query_point(x, "UnivariateSketch::cdf");
  const Frame f = frame_of(standardize_, moments_);
  double terms[kMaxHermiteOrder + 1];
  lower_integral_values((x - f.center) / f.scale, order_n_, terms);
  const double v = series_value(coeffs_, terms, accelerate);
  return clipped ? clamp_unit(v) : v;
}

std::vector<double> UnivariateSketch::cdf(std::span<const double> xs, bool clipped,
                                          bool accelerate) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(cdf(x, clipped, accelerate));
  return out;
}

double UnivariateSketch::quantform_std(double xs, bool accelerate) const {
  double terms[kMaxHermiteOrder + 1];
  if (xs >= 0.0) {
    upper_integral_values(xs, order_n_, terms);
    return 1.0 - series_value(coeffs_, terms, accelerate);
  }
  lower_integral_values(xs, order_n_, terms);
  return series_value(coeffs_, terms, accelerate);
}

double UnivariateSketch::cdf_quantile_form(double x, bool accelerate) const {
  check_nonempty(count_, "UnivariateSketch::cdf_quantile_form");
  check_query_point(x, "UnivariateSketch::cdf_quantile_form");
  const Frame f = frame_of(standardize_, moments_);
  return quantform_std((x - f.center) / f.scale, accelerate);
}

std::vector<double> UnivariateSketch::quantiles(std::span<const double> ps,
                                                QuantileAlgorithm algorithm,
                                                bool accelerate) const {
  if (count_ < 2) {
    throw std::invalid_argument("UnivariateSketch::quantiles: at least two observations required");
  }
  for (double p : ps) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw std::invalid_argument("UnivariateSketch::quantiles: p must be inside (0, 1)");
    }
  }
  const Frame f = frame_of(standardize_, moments_);
  std::vector<double> out;
  out.reserve(ps.size());

  if (algorithm == QuantileAlgorithm::kInterpolate) {
    static_assert(kGridPoints >= 2);
    std::vector<double> grid(kGridPoints);
    std::vector<double> cum(kGridPoints);
    const double step = (kGridHi - kGridLo) / (kGridPoints - 1);
    double running = -1.0;
    for (int i = 0; i < kGridPoints; ++i) {
      grid[i] = kGridLo + step * i;
      double v = quantform_std(grid[i], accelerate);
      running = std::max(running, v);  // monotonicity repair
      cum[i] = std::clamp(running, kCdfEps, 1.0 - kCdfEps);
    }
    for (double p : ps) {
      const auto it = std::lower_bound(cum.begin(), cum.end(), p);
      double xs;
      if (it == cum.begin()) {
        xs = grid.front();
      } else if (it == cum.end()) {
        xs = grid.back();
      } else {
        const std::size_t j = static_cast<std::size_t>(it - cum.begin());
        const double f0 = cum[j - 1];
        const double f1 = cum[j];
        xs = f1 > f0 ? grid[j - 1] + (p - f0) * (grid[j] - grid[j - 1]) / (f1 - f0) : grid[j - 1];
      }
      out.push_back(f.center + f.scale * xs);
    }
    return out;
  }

  for (double p : ps) {
    double lo = kBracketLo;
    double hi = kBracketHi;
    const double flo = std::clamp(quantform_std(lo, accelerate), kCdfEps, 1.0 - kCdfEps);
    const double fhi = std::clamp(quantform_std(hi, accelerate), kCdfEps, 1.0 - kCdfEps);
    double xs;
    if (p <= flo) {
      xs = lo;  // estimator mass sits below the bracket; clamp to the endpoint
    } else if (p >= fhi) {
      xs = hi;
    } else {
      for (int it = 0; it < kBisectMaxIter && hi - lo > kBisectTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = std::clamp(quantform_std(mid, accelerate), kCdfEps, 1.0 - kCdfEps);
        if (fmid < p) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      xs = 0.5 * (lo + hi);
    }
    out.push_back(f.center + f.scale * xs);
  }
  return out;
}

double UnivariateSketch::quantile(double p, QuantileAlgorithm algorithm, bool accelerate) const {
  const double ps[] = {p};
  return quantiles(ps, algorithm, accelerate).front();
}

UnivariateSketch UnivariateSketch::restore(int order_n, bool standardize,
                                           std::optional<double> exp_weight_lambda,
                                           std::uint64_t count, RunningMoments moments,
                                           std::vector<double> coefficients) {
  UnivariateSketch s(order_n, standardize, exp_weight_lambda);
  if (coefficients.size() != static_cast<std::size_t>(order_n) + 1) {
    throw std::invalid_argument("UnivariateSketch::restore: coefficient length mismatch");
  }
  for (double c : coefficients) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("UnivariateSketch::restore: coefficients must be finite");
    }
  }
  if (moments.exponential_mode() != exp_weight_lambda.has_value()) {
    throw std::invalid_argument("UnivariateSketch::restore: moment mode mismatch");
  }
  if (!moments.exponential_mode() && moments.count() != count) {
    throw std::invalid_argument("UnivariateSketch::restore: moment count mismatch");
  }
  s.count_ = count;
  s.moments_ = moments;
  s.coeffs_ = std::move(coefficients);
  return s;
}

}  // namespace hermsketch
