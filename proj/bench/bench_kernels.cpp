#include <benchmark/benchmark.h>

#include <vector>

#include "procure/kernels.hpp"
#include "procure/random.hpp"
#include "procure/scenarios.hpp"

namespace {

using namespace procure;

const TruncatedNormal kDemand(50.0, 8.0, 30.0, 70.0);

std::vector<double> uniforms(std::size_t n) {
  RandomStream rng(7);
  std::vector<double> u(n);
  rng.fill_uniform(u);
  return u;
}

std::vector<double> demand(std::size_t n) {
  const auto u = uniforms(n);
  std::vector<double> d(n);
  kernels::quantile_transform_serial(kDemand, u, d);
  return d;
}

void BM_quantile_serial(benchmark::State& state) {
  const auto u = uniforms(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(u.size());
  for (auto _ : state) {
    kernels::quantile_transform_serial(kDemand, u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_quantile_openmp(benchmark::State& state) {
  const auto u = uniforms(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(u.size());
  for (auto _ : state) {
    kernels::quantile_transform(kDemand, u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

const kernels::MarginRates kRates{120.0, 30.0, 40.0};

void BM_moments_serial(benchmark::State& state) {
  const auto d = demand(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::newsvendor_moments_serial(d, 51.0, kRates));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_moments_openmp(benchmark::State& state) {
  const auto d = demand(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::newsvendor_moments(d, 51.0, kRates));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_fill_serial(benchmark::State& state) {
  const auto d = demand(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(d.size());
  for (auto _ : state) {
    kernels::fill_rates_serial(d, 51.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_fill_openmp(benchmark::State& state) {
  const auto d = demand(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(d.size());
  for (auto _ : state) {
    kernels::fill_rates(d, 51.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_scenario_grid(benchmark::State& state) {
  auto spec = scenarios::preset("s10");
  spec.replications = 5000;
  for (auto _ : state) benchmark::DoNotOptimize(scenarios::run(spec));
}

}  // namespace

BENCHMARK(BM_quantile_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_quantile_openmp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_moments_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_moments_openmp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_fill_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_fill_openmp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_scenario_grid)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
