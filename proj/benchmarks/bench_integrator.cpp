#include <benchmark/benchmark.h>

#include <cmath>

#include "dlog/analysis.hpp"
#include "dlog/history.hpp"
#include "dlog/integrator.hpp"

namespace {

dlog::SolverConfig config(double t_end) {
  dlog::SolverConfig cfg;
  cfg.t_end = t_end;
  return cfg;
}

void BM_IntegrateExponential(benchmark::State& state) {
  const double r = 1.0;
  const dlog::Params p(r, std::exp(-r));
  const dlog::HistoryFn phi = dlog::HistoryFn::exp_profile(1.0, r, {});
  const dlog::SolverConfig cfg = config(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlog::integrate(p, phi, cfg));
  }
}
BENCHMARK(BM_IntegrateExponential)->Arg(5)->Arg(20);

void BM_IntegrateBlowupSeed(benchmark::State& state) {
  const dlog::Params p(1.0, 1.0);
  const dlog::HistoryFn phi = dlog::make_blowup_seed(p, 4.0);
  const dlog::SolverConfig cfg = config(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlog::integrate(p, phi, cfg));
  }
}
BENCHMARK(BM_IntegrateBlowupSeed);

void BM_IntegrateWrightLimitCycle(benchmark::State& state) {
  const dlog::Params p(2.0, 0.0);
  const dlog::HistoryFn phi = dlog::HistoryFn::constant(0.5);
  const dlog::SolverConfig cfg = config(50.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlog::integrate(p, phi, cfg));
  }
}
BENCHMARK(BM_IntegrateWrightLimitCycle);

void BM_ClassifySweep(benchmark::State& state) {
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double alpha = -0.999 + 1.998 * i / 1000.0;
      acc += dlog::classify(dlog::Params(1.0, alpha)).boundary_r.value_or(0.0);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_ClassifySweep);

void BM_CharRootOracle(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlog::char_root_boundary(0.3));
  }
}
BENCHMARK(BM_CharRootOracle);

}  // namespace

BENCHMARK_MAIN();
