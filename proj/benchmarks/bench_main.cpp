#include <benchmark/benchmark.h>

#include "skewlab/bundles.hpp"
#include "skewlab/foliations.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/skew_product.hpp"

using namespace skewlab;

namespace {

const RotationExtension& reference_map() {
  static const RotationExtension F = RotationExtension::paper_example();
  return F;
}

void BM_apply(benchmark::State& state) {
  const auto& F = reference_map();
  FiberedPoint p{{0.1234, 0.5678}, 0.9};
  for (auto _ : state) {
    p = F.apply(p);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_apply);

void BM_preimages(benchmark::State& state) {
  const auto& F = reference_map();
  const FiberedPoint p{{0.1234, 0.5678}, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(F.preimages(p));
}
BENCHMARK(BM_preimages);

void BM_derivative(benchmark::State& state) {
  const auto& F = reference_map();
  const FiberedPoint p{{0.02, 0.01}, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(F.derivative(p));
}
BENCHMARK(BM_derivative);

void BM_lyapunov(benchmark::State& state) {
  const auto& F = reference_map();
  for (auto _ : state) {
    benchmark::DoNotOptimize(lyapunov_exponents(F, {{0.1, 0.2}, 0.3}, state.range(0), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_lyapunov)->Arg(10000);

void BM_holonomy(benchmark::State& state) {
  const auto& F = reference_map();
  QuadrilateralSpec q;
  q.corner = {{0.0, 0.0}, 0.0};
  q.t = 0.2;
  q.s = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(quadrilateral_holonomy(F, q));
}
BENCHMARK(BM_holonomy);

void BM_leaf_density(benchmark::State& state) {
  const auto& F = reference_map();
  for (auto _ : state) {
    benchmark::DoNotOptimize(leaf_density_radius(F, {{0.1, 0.2}, 0.3}, static_cast<double>(state.range(0)), 20));
  }
}
BENCHMARK(BM_leaf_density)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
