#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "hermsketch/errors.hpp"
#include "hermsketch/eval.hpp"
#include "hermsketch/sketch_file.hpp"

using namespace hermsketch;

namespace {

bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!bit_equal(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("fresh univariate sketch round-trips") {
  const UnivariateSketch s(10, true);
  const AnySketch back = deserialize(serialize(s));
  REQUIRE(std::holds_alternative<UnivariateSketch>(back));
  const auto& r = std::get<UnivariateSketch>(back);
  CHECK(r.order_n() == 10);
  CHECK(r.standardize());
  CHECK(!r.exp_weight_lambda());
  CHECK(r.count() == 0);
  CHECK(bit_equal(r.coefficients(), s.coefficients()));
}

TEST_CASE("bivariate sketch round-trips bit for bit") {
  const auto pairs = eval::sample_bivariate_normal(1000, 0.3, 81);
  BivariateSketch s(12, true);
  s.update_batch(pairs);

  const std::string text = serialize(s);
  const AnySketch back = deserialize(text);
  REQUIRE(std::holds_alternative<BivariateSketch>(back));
  const auto& r = std::get<BivariateSketch>(back);
  CHECK(bit_equal(r.coefficient_matrix(), s.coefficient_matrix()));
  CHECK(bit_equal(r.marginal_x(), s.marginal_x()));
  CHECK(bit_equal(r.marginal_y(), s.marginal_y()));
  CHECK(bit_equal(r.moments_x().mean(), s.moments_x().mean()));
  CHECK(bit_equal(r.moments_x().spread(), s.moments_x().spread()));
  CHECK(r.count() == s.count());
  CHECK(bit_equal(r.kendall(), s.kendall()));
  CHECK(bit_equal(r.spearman(), s.spearman()));
  CHECK(serialize(r) == text);
}

TEST_CASE("exponential sketches carry their weighting") {
  UnivariateSketch s(6, true, 0.05);
  std::mt19937_64 rng(82);
  std::normal_distribution<double> d;
  for (int i = 0; i < 200; ++i) s.update(d(rng));
  const auto r = std::get<UnivariateSketch>(deserialize(serialize(s)));
  CHECK(r.exp_weight_lambda() == 0.05);
  CHECK(r.moments().exponential_mode());
  CHECK(bit_equal(r.coefficients(), s.coefficients()));
  CHECK(bit_equal(r.moments().mean(), s.moments().mean()));
}

TEST_CASE("many random sketches round-trip") {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 10; ++trial) {
    const int order = static_cast<int>(rng() % 12);
    const bool standardize = rng() % 2 == 0;
    if (rng() % 2 == 0) {
      UnivariateSketch s(order, standardize);
      const int n = static_cast<int>(rng() % 100);
      for (int i = 0; i < n; ++i) s.update(d(rng));
      const auto r = std::get<UnivariateSketch>(deserialize(serialize(s)));
      CHECK(bit_equal(r.coefficients(), s.coefficients()));
      CHECK(r.count() == s.count());
    } else {
      BivariateSketch s(order, standardize);
      const int n = static_cast<int>(rng() % 100);
      for (int i = 0; i < n; ++i) s.update(d(rng), d(rng));
      const auto r = std::get<BivariateSketch>(deserialize(serialize(s)));
      CHECK(bit_equal(r.coefficient_matrix(), s.coefficient_matrix()));
      CHECK(r.count() == s.count());
    }
  }
}

TEST_CASE("malformed documents are rejected with the failing section named") {
  UnivariateSketch s(4, false);
  s.update(1.0);
  const std::string good = serialize(s);

  // truncation
  CHECK_THROWS_AS(deserialize(good.substr(0, good.size() / 2)), data_error);

  // version mismatch
  {
    std::string text = good;
    const auto pos = text.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"format_version\": 1").size(), "\"format_version\": 99");
    CHECK_THROWS_WITH_AS(deserialize(text), doctest::Contains("format_version"), data_error);
  }

  // missing section
  {
    std::string text = good;
    const auto pos = text.find("\"coefficients\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"coefficients\"").size(), "\"koefficients\"");
    CHECK_THROWS_WITH_AS(deserialize(text), doctest::Contains("coefficients"), data_error);
  }

  // length mismatch
  {
    std::string text = good;
    const auto pos = text.find("\"order_n\": 4");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"order_n\": 4").size(), "\"order_n\": 5");
    CHECK_THROWS_AS(deserialize(text), data_error);
  }

  // non-finite payload
  {
    std::string text = good;
    const auto pos = text.find("\"obs_count\"");
    REQUIRE(pos != std::string::npos);
    std::string broken = good;
    const auto cpos = broken.find("\"coefficients\": [");
    REQUIRE(cpos != std::string::npos);
    broken.insert(cpos + std::string("\"coefficients\": [").size(), "null,");
    // keeps the array length only if we also drop one element; simply expect a data error
    CHECK_THROWS_AS(deserialize(broken), data_error);
  }
}

TEST_CASE("unknown estimator types are rejected") {
  const std::string text = R"({
    "format_version": 1,
    "est_type": "trivariate",
    "order_n": 2,
    "standardize": false,
    "lambda": null,
    "obs_count": 0,
    "moments": [{"mode": "cumulative", "count": 0, "mean": 0.0, "m2": 0.0}],
    "coefficients": [0.0, 0.0, 0.0]
  })";
  CHECK_THROWS_WITH_AS(deserialize(text), doctest::Contains("est_type"), data_error);
}
