#include "hermsketch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hermsketch/bivariate_sketch.hpp"
#include "hermsketch/sobol.hpp"

namespace hermsketch::eval {

namespace {

// Replication seeds derived by splitmix so studies stay deterministic
// under any parallel schedule.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t rep) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream * 1000003ULL + rep + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

IaeResult iae_measures(const QuantileFn& estimated_quantiles, const TestDistribution& dist,
                       int qmc_points) {
  if (qmc_points < 256) {
    throw std::invalid_argument("iae_measures: at least 256 quadrature points required");
  }
  const std::vector<double> u = sobol_points(static_cast<std::size_t>(qmc_points));
  std::vector<double> ps_full = u;
  std::vector<double> ps_partial(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) ps_partial[i] = 0.01 + 0.98 * u[i];

  const std::vector<double> q_full = estimated_quantiles(ps_full);
  const std::vector<double> q_partial = estimated_quantiles(ps_partial);

  IaeResult r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    r.iae += std::abs(q_full[i] - dist.quantile(ps_full[i]));
    r.piae += std::abs(q_partial[i] - dist.quantile(ps_partial[i]));
  }
  r.iae /= static_cast<double>(u.size());
  r.piae /= static_cast<double>(u.size());
  return r;
}

IaeResult iae_measures(const UnivariateSketch& sketch, const TestDistribution& dist,
                       int qmc_points) {
  if (sketch.count() == 0) throw std::invalid_argument("iae_measures: sketch is empty");
  return iae_measures(
      [&sketch](std::span<const double> ps) {
        return sketch.quantiles(ps, QuantileAlgorithm::kInterpolate, true);
      },
      dist, qmc_points);
}

std::vector<StudyResult> quantile_iae_study(std::span<const TestDistribution> dists,
                                            std::uint64_t n, int replications, int order_n,
                                            int qmc_points, std::uint64_t seed) {
  if (replications < 1) throw std::invalid_argument("quantile_iae_study: replications must be positive");
  if (n < 2) throw std::invalid_argument("quantile_iae_study: n must be at least 2");
  std::vector<StudyResult> out;
  out.reserve(dists.size());
  for (std::size_t d = 0; d < dists.size(); ++d) {
    const TestDistribution& dist = dists[d];
    std::vector<double> iaes;
    std::vector<double> piaes;
    for (int rep = 0; rep < replications; ++rep) {
      Rng rng(mix_seed(seed, d, static_cast<std::uint64_t>(rep)));
      std::vector<double> draws(n);
      for (auto& x : draws) x = dist.sample(rng);
      UnivariateSketch sketch(order_n, true);
      sketch.update_batch(draws);
      const IaeResult r = iae_measures(sketch, dist, qmc_points);
      iaes.push_back(r.iae);
      piaes.push_back(r.piae);
    }
    StudyResult res;
    res.name = dist.name;
    res.sample_size = n;
    res.replications = replications;
    res.miae = mean_of(iaes);
    res.pmiae = mean_of(piaes);
    res.error_std = std_of(piaes, res.pmiae);
    out.push_back(std::move(res));
  }
  return out;
}

double sample_spearman(std::span<const std::array<double, 2>> data) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("sample_spearman: at least two pairs required");
  const auto ranks = [n](auto&& key) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && key(idx[j + 1]) == key(idx[i])) ++j;
      const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks([&](std::size_t i) { return data[i][0]; });
  const std::vector<double> ry = ranks([&](std::size_t i) { return data[i][1]; });
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

CorrelationStudy correlation_mae_study(std::uint64_t n, std::span<const double> rhos,
                                       int replications, int order_n, std::uint64_t seed) {
  if (replications < 2) throw std::invalid_argument("correlation_mae_study: replications must be at least 2");
  if (n < 2) throw std::invalid_argument("correlation_mae_study: n must be at least 2");
  for (double rho : rhos) {
    if (!(rho > -1.0) || !(rho < 1.0)) {
      throw std::invalid_argument("correlation_mae_study: rho must be inside (-1, 1)");
    }
  }

  CorrelationStudy study;
  char label[64];
  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    const double rho = rhos[ri];
    const double tau_true = 2.0 / std::numbers::pi * std::asin(rho);
    std::vector<double> spearman_errors;
    std::vector<double> kendall_errors;
    for (int rep = 0; rep < replications; ++rep) {
      const auto draws = sample_bivariate_normal(n, rho, mix_seed(seed, 100 + ri, rep));
      BivariateSketch sketch(order_n, true);
      sketch.update_batch(draws);
      spearman_errors.push_back(std::abs(sketch.spearman() - sample_spearman(draws)));
      kendall_errors.push_back(std::abs(sketch.kendall() - tau_true));
    }
    std::snprintf(label, sizeof(label), "rho=%+.2f", rho);
    StudyResult sr;
    sr.name = label;
    sr.sample_size = n;
    sr.replications = replications;
    sr.mae = mean_of(spearman_errors);
    sr.error_std = std_of(spearman_errors, sr.mae);
    StudyResult kr = sr;
    kr.mae = mean_of(kendall_errors);
    kr.error_std = std_of(kendall_errors, kr.mae);
    study.spearman.push_back(std::move(sr));
    study.kendall.push_back(std::move(kr));
  }

  std::vector<double> smaes;
  std::vector<double> kmaes;
  for (const auto& r : study.spearman) smaes.push_back(r.mae);
  for (const auto& r : study.kendall) kmaes.push_back(r.mae);
  study.spearman_mae_avg = mean_of(smaes);
  study.spearman_mae_std = std_of(smaes, study.spearman_mae_avg);
  study.kendall_mae_avg = mean_of(kmaes);
  study.kendall_mae_std = std_of(kmaes, study.kendall_mae_avg);
  return study;
}

}  // namespace hermsketch::eval
