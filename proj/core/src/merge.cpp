#include "hermsketch/merge.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hermsketch/errors.hpp"
#include "hermsketch/hermite_basis.hpp"

namespace hermsketch {

namespace {

constexpr int kMergeQuadratureOrder = 64;
constexpr double kSqrt2 = std::numbers::sqrt2;

const GaussHermiteRule& merge_rule() {
  static const GaussHermiteRule rule = gauss_hermite_rule(kMergeQuadratureOrder);
  return rule;
}

struct Affine {
  double scale = 1.0;
  double shift = 0.0;
  bool identity() const { return scale == 1.0 && shift == 0.0; }
  double operator()(double x) const { return scale * x + shift; }
};

// Maps shard-standardized coordinates into merged-standardized ones.
Affine shard_to_merged(const RunningMoments& shard, const RunningMoments& merged) {
  const double ss = shard.scale();
  const double sm = merged.scale();
  return {ss / sm, (shard.center() - merged.center()) / sm};
}

template <typename Sketch>
void check_mergeable(std::span<const Sketch> sketches) {
  if (sketches.empty()) throw std::invalid_argument("merge_sketches: empty list");
  const auto& first = sketches.front();
  for (const auto& s : sketches) {
    if (s.exp_weight_lambda()) {
      throw incompatible_sketch_error(
          "merge_sketches: exponentially weighted sketches cannot be merged");
    }
    if (s.order_n() != first.order_n()) {
      throw incompatible_sketch_error("merge_sketches: sketches differ in order");
    }
    if (s.standardize() != first.standardize()) {
      throw incompatible_sketch_error(
          "merge_sketches: standardize must match across sketches");
    }
    if (s.count() == 0) {
      throw std::invalid_argument("merge_sketches: every sketch needs at least one observation");
    }
    if (s.standardize() && s.count() < 2) {
      throw std::invalid_argument(
          "merge_sketches: standardized merging needs at least two observations per sketch");
    }
  }
}

// Expectation of the basis vector under the shard's density estimate,
// with the basis evaluated at map(x): the quadrature form of the
// standardized-merge coefficient transform. acc[k] accumulates
// weight * E_j[h_k(map(X))].
void transform_univariate(const std::vector<double>& shard_coeffs, int order_n,
                          const Affine& map, long double weight,
                          std::vector<long double>& acc) {
  const auto& rule = merge_rule();
  const std::size_t m = shard_coeffs.size();
  std::vector<double> h(m);
  std::vector<double> hm(m);
  for (int i = 0; i < rule.order; ++i) {
    const double x = kSqrt2 * rule.nodes[i];
    const double c = kSqrt2 * rule.total_weights[i];
    hermite_function_values(x, order_n, h.data());
    double density = 0.0;
    for (std::size_t l = 0; l < m; ++l) density += shard_coeffs[l] * h[l];
    hermite_function_values(map(x), order_n, hm.data());
    const long double f = weight * c * density;
    for (std::size_t k = 0; k < m; ++k) acc[k] += f * hm[k];
  }
}

}  // namespace

UnivariateSketch merge_sketches(std::span<const UnivariateSketch> sketches) {
  check_mergeable(sketches);
  if (sketches.size() == 1) return sketches.front();

  const auto& first = sketches.front();
  const std::size_t m = first.coefficients().size();

  std::vector<RunningMoments> moments;
  moments.reserve(sketches.size());
  std::uint64_t total = 0;
  for (const auto& s : sketches) {
    moments.push_back(s.moments());
    total += s.count();
  }
  const RunningMoments merged_moments = merge_moments(moments);

  std::vector<long double> acc(m, 0.0L);
  if (!first.standardize()) {
    for (const auto& s : sketches) {
      const long double w = static_cast<long double>(s.count()) / total;
      for (std::size_t k = 0; k < m; ++k) acc[k] += w * s.coefficients()[k];
    }
  } else {
    for (const auto& s : sketches) {
      const long double w = static_cast<long double>(s.count()) / total;
      const Affine map = shard_to_merged(s.moments(), merged_moments);
      if (map.identity()) {
        for (std::size_t k = 0; k < m; ++k) acc[k] += w * s.coefficients()[k];
      } else {
        transform_univariate(s.coefficients(), first.order_n(), map, w, acc);
      }
    }
  }
  std::vector<double> coeffs(acc.begin(), acc.end());
  return UnivariateSketch::restore(first.order_n(), first.standardize(), std::nullopt, total,
                                   merged_moments, std::move(coeffs));
}

BivariateSketch merge_sketches(std::span<const BivariateSketch> sketches) {
  check_mergeable(sketches);
  if (sketches.size() == 1) return sketches.front();

  const auto& first = sketches.front();
  const int order_n = first.order_n();
  const std::size_t m = static_cast<std::size_t>(order_n) + 1;

  std::vector<RunningMoments> mx;
  std::vector<RunningMoments> my;
  std::uint64_t total = 0;
  for (const auto& s : sketches) {
    mx.push_back(s.moments_x());
    my.push_back(s.moments_y());
    total += s.count();
  }
  const RunningMoments merged_x = merge_moments(mx);
  const RunningMoments merged_y = merge_moments(my);

  std::vector<long double> acc(m * m, 0.0L);
  std::vector<long double> acc_mx(m, 0.0L);
  std::vector<long double> acc_my(m, 0.0L);

  if (!first.standardize()) {
    for (const auto& s : sketches) {
      const long double w = static_cast<long double>(s.count()) / total;
      for (std::size_t i = 0; i < m * m; ++i) acc[i] += w * s.coefficient_matrix()[i];
      for (std::size_t k = 0; k < m; ++k) {
        acc_mx[k] += w * s.marginal_x()[k];
        acc_my[k] += w * s.marginal_y()[k];
      }
    }
  } else {
    const auto& rule = merge_rule();
    const int q = rule.order;
    // Basis values at the quadrature abscissae, shared by every shard.
    std::vector<double> basis(m * q);
    for (int i = 0; i < q; ++i) {
      double h[kMaxHermiteOrder + 1];
      hermite_function_values(kSqrt2 * rule.nodes[i], order_n, h);
      for (std::size_t k = 0; k < m; ++k) basis[k * q + i] = h[k];
    }
    std::vector<double> gx(m * q);  // c_i * h_k(map_x(x_i)), row-major (m x q)
    std::vector<double> gy(m * q);  // c_j * h_l(map_y(x_j))
    std::vector<double> density(static_cast<std::size_t>(q) * q);
    std::vector<double> tmp(m * q);
    std::vector<double> proj(static_cast<std::size_t>(q) * m);

    for (const auto& s : sketches) {
      const long double w = static_cast<long double>(s.count()) / total;
      const Affine map_x = shard_to_merged(s.moments_x(), merged_x);
      const Affine map_y = shard_to_merged(s.moments_y(), merged_y);
      if (map_x.identity() && map_y.identity()) {
        for (std::size_t i = 0; i < m * m; ++i) acc[i] += w * s.coefficient_matrix()[i];
        for (std::size_t k = 0; k < m; ++k) {
          acc_mx[k] += w * s.marginal_x()[k];
          acc_my[k] += w * s.marginal_y()[k];
        }
        continue;
      }

      transform_univariate(s.marginal_x(), order_n, map_x, w, acc_mx);
      transform_univariate(s.marginal_y(), order_n, map_y, w, acc_my);

      // density(i, j) = f_shard(x_i, x_j) on the tensor grid: basis^T A basis.
      const std::vector<double>& a = s.coefficient_matrix();
      for (std::size_t k = 0; k < m; ++k) {
        const double* arow = a.data() + k * m;
        double* trow = tmp.data() + k * q;
        for (int j = 0; j < q; ++j) {
          double v = 0.0;
          for (std::size_t l = 0; l < m; ++l) v += arow[l] * basis[l * q + j];
          trow[j] = v;
        }
      }
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
          double v = 0.0;
          for (std::size_t k = 0; k < m; ++k) v += basis[k * q + i] * tmp[k * q + j];
          density[static_cast<std::size_t>(i) * q + j] = v;
        }
      }
      // Transformed basis at the abscissae, per-axis quadrature factor folded in.
      for (int i = 0; i < q; ++i) {
        const double x = kSqrt2 * rule.nodes[i];
        const double c = kSqrt2 * rule.total_weights[i];
        double hx[kMaxHermiteOrder + 1];
        double hy[kMaxHermiteOrder + 1];
        hermite_function_values(map_x(x), order_n, hx);
        hermite_function_values(map_y(x), order_n, hy);
        for (std::size_t k = 0; k < m; ++k) {
          gx[k * q + i] = c * hx[k];
          gy[k * q + i] = c * hy[k];
        }
      }
      // acc += w * gx . density . gy^T, split into two products.
      for (int i = 0; i < q; ++i) {
        const double* drow = density.data() + static_cast<std::size_t>(i) * q;
        double* prow = proj.data() + static_cast<std::size_t>(i) * m;
        for (std::size_t l = 0; l < m; ++l) {
          double v = 0.0;
          const double* gyl = gy.data() + l * q;
          for (int j = 0; j < q; ++j) v += drow[j] * gyl[j];
          prow[l] = v;
        }
      }
      for (std::size_t k = 0; k < m; ++k) {
        const double* gxk = gx.data() + k * q;
        for (std::size_t l = 0; l < m; ++l) {
          long double v = 0.0L;
          for (int i = 0; i < q; ++i) v += static_cast<long double>(gxk[i]) * proj[static_cast<std::size_t>(i) * m + l];
          acc[k * m + l] += w * v;
        }
      }
    }
  }

  std::vector<double> coeff(acc.begin(), acc.end());
  std::vector<double> marg_x(acc_mx.begin(), acc_mx.end());
  std::vector<double> marg_y(acc_my.begin(), acc_my.end());
  return BivariateSketch::restore(order_n, first.standardize(), std::nullopt, total, merged_x,
                                  merged_y, std::move(coeff), std::move(marg_x),
                                  std::move(marg_y));
}

}  // namespace hermsketch
