#include "hermsketch/running_moments.hpp"

#include <cmath>
#include <stdexcept>

namespace hermsketch {

RunningMoments RunningMoments::exponential(double lambda) {
  if (!(lambda > 0.0) || !(lambda <= 1.0)) {
    throw std::invalid_argument("RunningMoments: lambda must be in (0, 1]");
  }
  RunningMoments m;
  m.lambda_ = lambda;
  return m;
}

void RunningMoments::update(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("RunningMoments: observation must be finite");
  }
  ++count_;
  if (lambda_) {
    if (count_ == 1) {
      mean_ = x;
      spread_ = 0.0;
    } else {
      const double l = *lambda_;
      const double dev = x - mean_;
      spread_ = (1.0 - l) * spread_ + l * dev * dev;
      mean_ = (1.0 - l) * mean_ + l * x;
    }
  } else {
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    spread_ += delta * (x - mean_);
  }
}

double RunningMoments::variance() const noexcept {
  if (lambda_) return spread_;
  if (count_ < 2) return 0.0;
  return spread_ / static_cast<double>(count_ - 1);
}

double RunningMoments::scale() const noexcept {
  if (count_ < 2 || spread_ <= 0.0) return 1.0;
  return std::sqrt(variance());
}

RunningMoments RunningMoments::restore(std::optional<double> lambda, std::uint64_t count,
                                       double mean, double spread) {
  RunningMoments m = lambda ? exponential(*lambda) : RunningMoments();
  if (!std::isfinite(mean) || !std::isfinite(spread)) {
    throw std::invalid_argument("RunningMoments: state must be finite");
  }
  if (spread < 0.0) {
    throw std::invalid_argument("RunningMoments: spread must be non-negative");
  }
  m.count_ = count;
  m.mean_ = mean;
  m.spread_ = spread;
  return m;
}

RunningMoments merge_moments(std::span<const RunningMoments> states) {
  if (states.empty()) {
    throw std::invalid_argument("merge_moments: empty list");
  }
  std::uint64_t n = 0;
  for (const auto& s : states) {
    if (s.exponential_mode()) {
      throw std::invalid_argument("merge_moments: exponential states cannot be merged");
    }
    n += s.count();
  }
  if (n == 0) return {};
  double mean = 0.0;
  for (const auto& s : states) {
    mean += static_cast<double>(s.count()) / static_cast<double>(n) * s.mean();
  }
  double m2 = 0.0;
  for (const auto& s : states) {
    if (s.count() == 0) continue;
    const double d = s.mean() - mean;
    m2 += s.spread() + static_cast<double>(s.count()) * d * d;
  }
  return RunningMoments::restore(std::nullopt, n, mean, m2);
}

}  // namespace hermsketch
