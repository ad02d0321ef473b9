#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hermsketch/bivariate_sketch.hpp"
#include "hermsketch/merge.hpp"
#include "hermsketch/univariate_sketch.hpp"

namespace {

std::vector<double> draws(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<double> out(n);
  for (auto& x : out) x = d(rng);
  return out;
}

void UniUpdateSequential(benchmark::State& state) {
  const auto data = draws(4096);
  hermsketch::UnivariateSketch sketch(static_cast<int>(state.range(0)), true);
  std::size_t i = 0;
  for (auto _ : state) {
    sketch.update(data[i++ & 4095]);
    benchmark::DoNotOptimize(sketch.coefficients().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(UniUpdateSequential)->Arg(10)->Arg(30)->Arg(100);

void UniUpdateBatch(benchmark::State& state) {
  const auto data = draws(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    hermsketch::UnivariateSketch sketch(30, true);
    sketch.update_batch(data);
    benchmark::DoNotOptimize(sketch.coefficients().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(UniUpdateBatch)->Range(1 << 10, 1 << 18);

void BivUpdateSequential(benchmark::State& state) {
  const auto data = draws(8192);
  hermsketch::BivariateSketch sketch(static_cast<int>(state.range(0)), true);
  std::size_t i = 0;
  for (auto _ : state) {
    sketch.update(data[i & 4095], data[(i + 17) & 4095]);
    ++i;
    benchmark::DoNotOptimize(sketch.coefficient_matrix().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BivUpdateSequential)->Arg(10)->Arg(30);

void QuantileQuery(benchmark::State& state) {
  const auto data = draws(100000);
  hermsketch::UnivariateSketch sketch(30, true);
  sketch.update_batch(data);
  std::vector<double> ps(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ps[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(ps.size());
  }
  const auto algorithm = state.range(1) == 0 ? hermsketch::QuantileAlgorithm::kInterpolate
                                             : hermsketch::QuantileAlgorithm::kBisection;
  for (auto _ : state) {
    auto qs = sketch.quantiles(ps, algorithm);
    benchmark::DoNotOptimize(qs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(QuantileQuery)->Args({1, 0})->Args({100, 0})->Args({10000, 0})->Args({1, 1})->Args({100, 1});

void MergeUnivariate(benchmark::State& state) {
  const auto data = draws(40000);
  const int parts = static_cast<int>(state.range(0));
  std::vector<hermsketch::UnivariateSketch> shards;
  for (int p = 0; p < parts; ++p) {
    hermsketch::UnivariateSketch s(30, false);
    s.update_batch(std::span(data).subspan(static_cast<std::size_t>(p) * data.size() / parts,
                                           data.size() / parts));
    shards.push_back(std::move(s));
  }
  for (auto _ : state) {
    auto merged = hermsketch::merge_sketches(std::span<const hermsketch::UnivariateSketch>(shards));
    benchmark::DoNotOptimize(merged.coefficients().data());
  }
}
BENCHMARK(MergeUnivariate)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
