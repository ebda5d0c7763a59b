#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "crowdmarket/kernels.hpp"
#include "crowdmarket/scenario.hpp"

namespace {

using namespace crowdmarket;

struct SweepFixture {
  explicit SweepFixture(std::size_t n) {
    ScenarioConfig cfg;
    cfg.n = n;
    const MarketInstance inst = generate_random_instance(cfg).instance;
    const auto& w = inst.graph().weights();
    weights.assign(w.data(), w.data() + w.size());
    for (std::size_t i = 0; i < n; ++i) {
      drive.push_back(inst.a()(static_cast<Eigen::Index>(i)) + 1.0 - inst.params().c);
      two_b.push_back(inst.two_b()(static_cast<Eigen::Index>(i)));
    }
    x.assign(n, 1.0);
    out.assign(n, 0.0);
    ops = kernels::SweepOperands{weights, drive, two_b, n};
  }
  std::vector<double> weights, drive, two_b, x, out;
  kernels::SweepOperands ops;
};

void BM_SweepSerial(benchmark::State& state) {
  SweepFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::best_response_sweep_serial(f.ops, f.x, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
}

void BM_SweepOmp(benchmark::State& state) {
  SweepFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::best_response_sweep_omp(f.ops, f.x, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
}

double bumpy(std::size_t k) {
  const double t = static_cast<double>(k) * 1e-4;
  return std::sin(t) * std::exp(-0.01 * t);
}

void BM_ArgmaxSerial(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_argmax_serial(count, bumpy));
}

void BM_ArgmaxOmp(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_argmax_omp(count, bumpy));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(100)->Arg(500)->Arg(2000);
BENCHMARK(BM_SweepOmp)->Arg(100)->Arg(500)->Arg(2000);
BENCHMARK(BM_ArgmaxSerial)->Arg(30001)->Arg(300001);
BENCHMARK(BM_ArgmaxOmp)->Arg(30001)->Arg(300001);

BENCHMARK_MAIN();
