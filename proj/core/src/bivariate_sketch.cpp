#include "hermsketch/bivariate_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hermsketch/hermite_basis.hpp"

namespace hermsketch {

namespace {

constexpr double kPdfFloor = 1e-8;

void check_pair(double x, double y, const char* who) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument(std::string(who) + ": observations must be finite");
  }
}

double standardized(bool standardize, const RunningMoments& m, double v) {
  return standardize ? (v - m.center()) / m.scale() : v;
}

// y = M v for row-major (n x n) M.
void matvec(const std::vector<double>& m, std::span<const double> v, std::span<double> out) {
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = m.data() + k * n;
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += row[l] * v[l];
    out[k] = s;
  }
}

double quad_form(std::span<const double> u, const std::vector<double>& m,
                 std::span<const double> v) {
  const std::size_t n = u.size();
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = m.data() + k * n;
    double inner = 0.0;
    for (std::size_t l = 0; l < n; ++l) inner += row[l] * v[l];
    s += u[k] * inner;
  }
  return s;
}

}  // namespace

BivariateSketch::BivariateSketch(int order_n, bool standardize,
                                 std::optional<double> exp_weight_lambda)
    : order_n_(order_n), standardize_(standardize), lambda_(exp_weight_lambda) {
  if (order_n < 0 || order_n > kMaxHermiteOrder) {
    throw std::invalid_argument("BivariateSketch: order must be in [0, " +
                                std::to_string(kMaxHermiteOrder) + "]");
  }
  if (lambda_ && (!(*lambda_ > 0.0) || !(*lambda_ <= 1.0))) {
    throw std::invalid_argument("BivariateSketch: exp_weight_lambda must be in (0, 1]");
  }
  if (lambda_) {
    moments_x_ = RunningMoments::exponential(*lambda_);
    moments_y_ = RunningMoments::exponential(*lambda_);
  }
  const std::size_t m = static_cast<std::size_t>(order_n_) + 1;
  coeff_.assign(m * m, 0.0);
  marginal_x_.assign(m, 0.0);
  marginal_y_.assign(m, 0.0);
}

void BivariateSketch::update(double x, double y) {
  check_pair(x, y, "BivariateSketch::update");
  moments_x_.update(x);
  moments_y_.update(y);
  const double xs = standardized(standardize_, moments_x_, x);
  const double ys = standardized(standardize_, moments_y_, y);
  double hx[kMaxHermiteOrder + 1];
  double hy[kMaxHermiteOrder + 1];
  hermite_function_values(xs, order_n_, hx);
  hermite_function_values(ys, order_n_, hy);

  const std::size_t m = marginal_x_.size();
  const double w = lambda_ ? (count_ == 0 ? 1.0 : *lambda_)
                           : 1.0 / static_cast<double>(count_ + 1);
  for (std::size_t k = 0; k < m; ++k) {
    double* row = coeff_.data() + k * m;
    const double hk = hx[k];
    for (std::size_t j = 0; j < m; ++j) row[j] += w * (hk * hy[j] - row[j]);
    marginal_x_[k] += w * (hx[k] - marginal_x_[k]);
    marginal_y_[k] += w * (hy[k] - marginal_y_[k]);
  }
  ++count_;
}

void BivariateSketch::update_batch(std::span<const std::array<double, 2>> pairs) {
  if (lambda_) {
    throw std::invalid_argument(
        "BivariateSketch::update_batch: exponentially weighted sketches update sequentially");
  }
  if (pairs.empty()) {
    throw std::invalid_argument("BivariateSketch::update_batch: empty batch");
  }
  RunningMoments bx;
  RunningMoments by;
  for (const auto& p : pairs) {
    bx.update(p[0]);
    by.update(p[1]);
  }
  const RunningMoments sx[] = {moments_x_, bx};
  const RunningMoments sy[] = {moments_y_, by};
  const RunningMoments mx = merge_moments(sx);
  const RunningMoments my = merge_moments(sy);
  const double cx = standardize_ ? mx.center() : 0.0;
  const double sxv = standardize_ ? mx.scale() : 1.0;
  const double cy = standardize_ ? my.center() : 0.0;
  const double syv = standardize_ ? my.scale() : 1.0;

  const std::size_t m = marginal_x_.size();
  std::vector<long double> acc(m * m, 0.0L);
  std::vector<long double> accx(m, 0.0L);
  std::vector<long double> accy(m, 0.0L);
  double hx[kMaxHermiteOrder + 1];
  double hy[kMaxHermiteOrder + 1];
  for (const auto& p : pairs) {
    hermite_function_values((p[0] - cx) / sxv, order_n_, hx);
    hermite_function_values((p[1] - cy) / syv, order_n_, hy);
    for (std::size_t k = 0; k < m; ++k) {
      long double* row = acc.data() + k * m;
      const long double hk = hx[k];
      for (std::size_t j = 0; j < m; ++j) row[j] += hk * hy[j];
      accx[k] += hx[k];
      accy[k] += hy[k];
    }
  }
  const long double total = static_cast<long double>(count_) + pairs.size();
  const long double prior = static_cast<long double>(count_);
  for (std::size_t i = 0; i < coeff_.size(); ++i) {
    coeff_[i] = static_cast<double>((prior * coeff_[i] + acc[i]) / total);
  }
  for (std::size_t k = 0; k < m; ++k) {
    marginal_x_[k] = static_cast<double>((prior * marginal_x_[k] + accx[k]) / total);
    marginal_y_[k] = static_cast<double>((prior * marginal_y_[k] + accy[k]) / total);
  }
  moments_x_ = mx;
  moments_y_ = my;
  count_ += pairs.size();
}

double BivariateSketch::pdf(double x, double y, bool clipped) const {
  if (count_ == 0) throw std::invalid_argument("BivariateSketch::pdf: sketch is empty");
  check_pair(x, y, "BivariateSketch::pdf");
  const double sx = standardize_ ? moments_x_.scale() : 1.0;
  const double sy = standardize_ ? moments_y_.scale() : 1.0;
  double hx[kMaxHermiteOrder + 1];
  double hy[kMaxHermiteOrder + 1];
  hermite_function_values(standardized(standardize_, moments_x_, x), order_n_, hx);
  hermite_function_values(standardized(standardize_, moments_y_, y), order_n_, hy);
  const std::size_t m = marginal_x_.size();
  double v = quad_form(std::span<const double>(hx, m), coeff_, std::span<const double>(hy, m));
  v /= sx * sy;
  if (clipped) v = std::max(v, kPdfFloor);
  return v;
}

std::vector<double> BivariateSketch::pdf(std::span<const std::array<double, 2>> points,
                                         bool clipped) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pdf(p[0], p[1], clipped));
  return out;
}

double BivariateSketch::cdf(double x, double y, bool clipped) const {
  if (count_ == 0) throw std::invalid_argument("BivariateSketch::cdf: sketch is empty");
  check_pair(x, y, "BivariateSketch::cdf");
  double lx[kMaxHermiteOrder + 1];
  double ly[kMaxHermiteOrder + 1];
  lower_integral_values(standardized(standardize_, moments_x_, x), order_n_, lx);
  lower_integral_values(standardized(standardize_, moments_y_, y), order_n_, ly);
  const std::size_t m = marginal_x_.size();
  const double v = quad_form(std::span<const double>(lx, m), coeff_, std::span<const double>(ly, m));
  return clipped ? std::clamp(v, 0.0, 1.0) : v;
}

std::vector<double> BivariateSketch::cdf(std::span<const std::array<double, 2>> points,
                                         bool clipped) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(cdf(p[0], p[1], clipped));
  return out;
}

double BivariateSketch::spearman() const {
  if (count_ < 2) {
    throw std::invalid_argument("BivariateSketch::spearman: at least two observations required");
  }
  const auto tables = basis_tables(order_n_);
  const std::vector<double>& w = tables->w_matrix();
  const std::vector<double>& z = tables->z_vector();
  const std::size_t m = marginal_x_.size();
  std::vector<double> wx(m);
  std::vector<double> wy(m);
  matvec(w, marginal_x_, wx);
  matvec(w, marginal_y_, wy);
  const double s1 = quad_form(wx, coeff_, wy);
  const double s2 = quad_form(wx, coeff_, z);
  const double s3 = quad_form(z, coeff_, wy);
  const double s4 = quad_form(z, coeff_, z);
  return std::clamp(12.0 * s1 - 6.0 * s2 - 6.0 * s3 + 3.0 * s4, -1.0, 1.0);
}

double BivariateSketch::kendall() const {
  if (count_ < 2) {
    throw std::invalid_argument("BivariateSketch::kendall: at least two observations required");
  }
  const auto tables = basis_tables(order_n_);
  const std::vector<double>& w = tables->w_matrix();
  const std::size_t m = marginal_x_.size();
  // tau = 4 <A, W A W^T> - 1, the scalar reduction of the concordance
  // integral 4 int F f - 1.
  std::vector<double> awt(m * m);  // A W^T
  for (std::size_t k = 0; k < m; ++k) {
    const double* arow = coeff_.data() + k * m;
    double* orow = awt.data() + k * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double* wrow = w.data() + j * m;
      double s = 0.0;
      for (std::size_t l = 0; l < m; ++l) s += arow[l] * wrow[l];
      orow[j] = s;
    }
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double* wrow = w.data() + k * m;
    const double* arow = coeff_.data() + k * m;
    for (std::size_t j = 0; j < m; ++j) {
      // (W A W^T)_{kj} = sum_l W_{kl} (A W^T)_{lj}
      double s = 0.0;
      for (std::size_t l = 0; l < m; ++l) s += wrow[l] * awt[l * m + j];
      acc += arow[j] * s;
    }
  }
  return std::clamp(4.0 * acc - 1.0, -1.0, 1.0);
}

BivariateSketch BivariateSketch::restore(int order_n, bool standardize,
                                         std::optional<double> exp_weight_lambda,
                                         std::uint64_t count, RunningMoments moments_x,
                                         RunningMoments moments_y,
                                         std::vector<double> coefficient_matrix,
                                         std::vector<double> marginal_x,
                                         std::vector<double> marginal_y) {
  BivariateSketch s(order_n, standardize, exp_weight_lambda);
  const std::size_t m = static_cast<std::size_t>(order_n) + 1;
  if (coefficient_matrix.size() != m * m || marginal_x.size() != m || marginal_y.size() != m) {
    throw std::invalid_argument("BivariateSketch::restore: coefficient shape mismatch");
  }
  auto check_finite = [](const std::vector<double>& v) {
    for (double c : v) {
      if (!std::isfinite(c)) {
        throw std::invalid_argument("BivariateSketch::restore: coefficients must be finite");
      }
    }
  };
  check_finite(coefficient_matrix);
  check_finite(marginal_x);
  check_finite(marginal_y);
  if (moments_x.exponential_mode() != exp_weight_lambda.has_value() ||
      moments_y.exponential_mode() != exp_weight_lambda.has_value()) {
    throw std::invalid_argument("BivariateSketch::restore: moment mode mismatch");
  }
  if (!exp_weight_lambda && (moments_x.count() != count || moments_y.count() != count)) {
    throw std::invalid_argument("BivariateSketch::restore: moment count mismatch");
  }
  s.count_ = count;
  s.moments_x_ = moments_x;
  s.moments_y_ = moments_y;
  s.coeff_ = std::move(coefficient_matrix);
  s.marginal_x_ = std::move(marginal_x);
  s.marginal_y_ = std::move(marginal_y);
  return s;
}

}  // namespace hermsketch
