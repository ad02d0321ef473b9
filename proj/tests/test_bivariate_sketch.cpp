#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "hermsketch/bivariate_sketch.hpp"
#include "hermsketch/distributions.hpp"
#include "hermsketch/eval.hpp"
#include "hermsketch/hermite_basis.hpp"
#include "hermsketch/univariate_sketch.hpp"
#include "oracles.hpp"

using namespace hermsketch;

namespace {

std::vector<std::array<double, 2>> random_pairs(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<std::array<double, 2>> out(n);
  for (auto& p : out) p = {d(rng), 0.4 * d(rng) + 0.2};
  return out;
}

}  // namespace

TEST_CASE("first pair stores the outer product") {
  BivariateSketch s(6, false);
  s.update(0.3, -0.7);
  const auto hx = hermite_function_values(0.3, 6);
  const auto hy = hermite_function_values(-0.7, 6);
  for (int k = 0; k <= 6; ++k) {
    for (int j = 0; j <= 6; ++j) {
      CHECK(s.coefficient_matrix()[static_cast<std::size_t>(k) * 7 + j] ==
            doctest::Approx(hx[k] * hy[j]).epsilon(1e-15));
    }
    CHECK(s.marginal_x()[k] == hx[k]);
    CHECK(s.marginal_y()[k] == hy[k]);
  }
}

TEST_CASE("lambda = 1 keeps the last pair only") {
  BivariateSketch s(5, false, 1.0);
  s.update(2.0, 1.0);
  s.update(-0.4, 0.9);
  const auto hx = hermite_function_values(-0.4, 5);
  const auto hy = hermite_function_values(0.9, 5);
  for (int k = 0; k <= 5; ++k) {
    for (int j = 0; j <= 5; ++j) {
      CHECK(s.coefficient_matrix()[static_cast<std::size_t>(k) * 6 + j] ==
            doctest::Approx(hx[k] * hy[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("sequential, batch and permutation agreement without standardization") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pairs = random_pairs(rng, 1 + rng() % 60);
    BivariateSketch seq(8, false);
    for (const auto& p : pairs) seq.update(p[0], p[1]);
    BivariateSketch batch(8, false);
    batch.update_batch(pairs);
    for (std::size_t i = 0; i < seq.coefficient_matrix().size(); ++i) {
      CHECK(std::abs(seq.coefficient_matrix()[i] - batch.coefficient_matrix()[i]) < 1e-14);
    }

    auto shuffled = pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    BivariateSketch perm(8, false);
    for (const auto& p : shuffled) perm.update(p[0], p[1]);
    for (std::size_t i = 0; i < seq.coefficient_matrix().size(); ++i) {
      CHECK(std::abs(seq.coefficient_matrix()[i] - perm.coefficient_matrix()[i]) < 1e-12);
    }
  }
}

TEST_CASE("batch of one equals sequential; half batches compose") {
  BivariateSketch a(7, true);
  a.update(0.3, -0.7);
  BivariateSketch b(7, true);
  const std::array<double, 2> one[] = {{0.3, -0.7}};
  b.update_batch(one);
  for (std::size_t i = 0; i < a.coefficient_matrix().size(); ++i) {
    CHECK(a.coefficient_matrix()[i] == b.coefficient_matrix()[i]);
  }

  std::mt19937_64 rng(52);
  const auto pairs = random_pairs(rng, 40);
  BivariateSketch split(7, false);
  split.update_batch(std::span(pairs).subspan(0, 25));
  split.update_batch(std::span(pairs).subspan(25));
  BivariateSketch whole(7, false);
  whole.update_batch(pairs);
  for (std::size_t i = 0; i < whole.coefficient_matrix().size(); ++i) {
    CHECK(std::abs(split.coefficient_matrix()[i] - whole.coefficient_matrix()[i]) < 1e-14);
  }
}

TEST_CASE("independent streams factorize into the marginals") {
  eval::Rng rng(53);
  BivariateSketch s(10, true);
  for (int i = 0; i < 100000; ++i) {
    s.update(eval::normal_quantile(eval::uniform01(rng)),
             eval::normal_quantile(eval::uniform01(rng)));
  }
  double frob = 0.0;
  for (int k = 0; k <= 10; ++k) {
    for (int j = 0; j <= 10; ++j) {
      const double d = s.coefficient_matrix()[static_cast<std::size_t>(k) * 11 + j] -
                       s.marginal_x()[k] * s.marginal_y()[j];
      frob += d * d;
    }
  }
  CHECK(std::sqrt(frob) < 0.05);
}

TEST_CASE("marginals match standalone univariate sketches") {
  std::mt19937_64 rng(54);
  const auto pairs = random_pairs(rng, 500);

  BivariateSketch seq(9, true);
  UnivariateSketch ux(9, true);
  UnivariateSketch uy(9, true);
  for (const auto& p : pairs) {
    seq.update(p[0], p[1]);
    ux.update(p[0]);
    uy.update(p[1]);
  }
  for (int k = 0; k <= 9; ++k) {
    CHECK(std::abs(seq.marginal_x()[k] - ux.coefficients()[k]) < 1e-12);
    CHECK(std::abs(seq.marginal_y()[k] - uy.coefficients()[k]) < 1e-12);
  }

  BivariateSketch batch(9, true);
  batch.update_batch(pairs);
  UnivariateSketch bx(9, true);
  UnivariateSketch by(9, true);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : pairs) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  bx.update_batch(xs);
  by.update_batch(ys);
  for (int k = 0; k <= 9; ++k) {
    CHECK(std::abs(batch.marginal_x()[k] - bx.coefficients()[k]) < 1e-12);
    CHECK(std::abs(batch.marginal_y()[k] - by.coefficients()[k]) < 1e-12);
  }
}

TEST_CASE("joint pdf and cdf against bivariate-normal truths") {
  const auto indep = eval::sample_bivariate_normal(100000, 1e-12, 55);
  BivariateSketch s(30, true);
  s.update_batch(indep);
  CHECK(std::abs(s.pdf(0.0, 0.0) - 1.0 / (2.0 * std::numbers::pi)) < 0.02);
  CHECK(std::abs(s.cdf(0.0, 0.0) - 0.25) < 0.02);

  const auto correlated = eval::sample_bivariate_normal(100000, 0.5, 56);
  BivariateSketch c(30, true);
  c.update_batch(correlated);
  // orthant probability 1/4 + asin(rho)/(2 pi) = 1/3 at rho = 1/2
  CHECK(std::abs(c.cdf(0.0, 0.0) - 1.0 / 3.0) < 0.02);
  CHECK(std::abs(c.cdf(5.0, 5.0) - 1.0) < 0.02);

  for (const auto& p : {std::array<double, 2>{0.0, 0.0}, {2.5, -1.0}, {-4.0, 4.0}}) {
    CHECK(c.pdf(p[0], p[1], true) >= 0.0);
  }
}

TEST_CASE("pdf integrates to about one") {
  const auto draws = eval::sample_bivariate_normal(4000, 0.5, 57);
  BivariateSketch s(30, true);
  s.update_batch(draws);
  double mass = 0.0;
  const double step = 0.25;
  for (double x = -5.0; x <= 5.0 + 1e-9; x += step) {
    for (double y = -5.0; y <= 5.0 + 1e-9; y += step) {
      double w = 1.0;
      if (std::abs(std::abs(x) - 5.0) < 1e-9) w *= 0.5;
      if (std::abs(std::abs(y) - 5.0) < 1e-9) w *= 0.5;
      mass += w * s.pdf(x, y) * step * step;
    }
  }
  CHECK(std::abs(mass - 1.0) < 0.05);
}

TEST_CASE("rank correlations on a correlated normal sample") {
  const auto draws = eval::sample_bivariate_normal(4000, 0.5, 58);
  BivariateSketch s(30, true);
  s.update_batch(draws);
  CHECK(std::abs(s.kendall() - 1.0 / 3.0) < 0.02);
  CHECK(std::abs(s.spearman() - eval::sample_spearman(draws)) < 0.03);

  // simultaneous axis exchange leaves both estimates unchanged
  BivariateSketch swapped(30, true);
  std::vector<std::array<double, 2>> flipped;
  for (const auto& p : draws) flipped.push_back({p[1], p[0]});
  swapped.update_batch(flipped);
  CHECK(std::abs(swapped.spearman() - s.spearman()) < 1e-10);
  CHECK(std::abs(swapped.kendall() - s.kendall()) < 1e-10);
}

TEST_CASE("independence gives near-zero kendall") {
  const auto draws = eval::sample_bivariate_normal(100000, 1e-12, 59);
  BivariateSketch s(30, true);
  s.update_batch(draws);
  CHECK(std::abs(s.kendall()) < 0.02);
  CHECK(std::abs(s.spearman()) < 0.02);
}

TEST_CASE("rank correlations are monotone-invariant and antisymmetric") {
  const auto draws = eval::sample_bivariate_normal(10000, 0.5, 60);
  BivariateSketch base(30, true);
  base.update_batch(draws);

  std::vector<std::array<double, 2>> cubed;
  std::vector<std::array<double, 2>> negated;
  for (const auto& p : draws) {
    cubed.push_back({p[0] * p[0] * p[0], p[1]});
    negated.push_back({-p[0], p[1]});
  }
  // Population rank correlations are exactly invariant; the estimates move
  // by their truncation bias. Cubing puts an integrable singularity in the
  // transformed marginal density, which costs roughly 0.12 on Kendall and
  // 0.04 on Spearman at this order, independent of n.
  BivariateSketch mono(30, true);
  mono.update_batch(cubed);
  CHECK(std::abs(mono.kendall() - base.kendall()) < 0.15);
  CHECK(std::abs(mono.spearman() - base.spearman()) < 0.06);

  BivariateSketch anti(30, true);
  anti.update_batch(negated);
  CHECK(std::abs(anti.kendall() + base.kendall()) < 0.01);
  CHECK(std::abs(anti.spearman() + base.spearman()) < 0.01);

  for (const auto& s : {base, mono, anti}) {
    CHECK(s.spearman() >= -1.0);
    CHECK(s.spearman() <= 1.0);
    CHECK(s.kendall() >= -1.0);
    CHECK(s.kendall() <= 1.0);
  }
}

TEST_CASE("correlation formulas equal the defining integrals at low order") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 2; ++trial) {
    const auto pairs = random_pairs(rng, 30);
    BivariateSketch s(6, false);
    s.update_batch(pairs);
    CHECK(std::abs(s.spearman() - testing::spearman_bruteforce(s)) < 1e-6);
    CHECK(std::abs(s.kendall() - testing::kendall_bruteforce(s)) < 1e-6);
  }
}

TEST_CASE("bivariate validation") {
  BivariateSketch s(8, true);
  CHECK_THROWS_AS(s.pdf(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.update(std::nan(""), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.update(0.0, std::numeric_limits<double>::infinity()), std::invalid_argument);
  s.update(1.0, 2.0);
  CHECK_THROWS_AS(s.spearman(), std::invalid_argument);
  CHECK_THROWS_AS(s.kendall(), std::invalid_argument);

  BivariateSketch exp_sketch(8, true, 0.1);
  const std::array<double, 2> pairs[] = {{1.0, 2.0}};
  CHECK_THROWS_AS(exp_sketch.update_batch(pairs), std::invalid_argument);
  CHECK_THROWS_AS(BivariateSketch(8, true, 2.0), std::invalid_argument);
}
