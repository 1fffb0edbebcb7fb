#include <benchmark/benchmark.h>

#include "dcl/cocoa.hpp"
#include "dcl/metrics.hpp"

namespace {

void BM_MonteCarlo(benchmark::State& state) {
  const auto exec = state.range(0) ? dcl::Exec::parallel : dcl::Exec::serial;
  const auto spec = dcl::TaskSequenceSpec::uniform(64, 32, 4, 16, 0.01);
  dcl::AlgoConfig algo;
  algo.K = 4;
  dcl::McOptions opts;
  opts.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(dcl::run_monte_carlo(spec, algo, 200, 7, opts).generalization.mean);
  state.SetLabel(exec == dcl::Exec::parallel ? "parallel" : "serial");
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Iterate(benchmark::State& state) {
  const auto exec = state.range(0) ? dcl::Exec::parallel : dcl::Exec::serial;
  const auto spec = dcl::TaskSequenceSpec::uniform(1024, 512, 1, 256, 0.01);
  dcl::RngStream rng(3);
  const auto w = dcl::generate_parameters(spec, rng);
  const auto data = dcl::generate_task_data(spec, w, rng);
  dcl::CocoaState cocoa(dcl::Partition::equal(1024, 8));
  dcl::init_task(cocoa, data[0], exec);
  for (auto _ : state) {
    dcl::iterate(cocoa, data[0], exec);
    benchmark::DoNotOptimize(cocoa.w_hat.data());
  }
  state.SetLabel(exec == dcl::Exec::parallel ? "parallel" : "serial");
}
BENCHMARK(BM_Iterate)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
