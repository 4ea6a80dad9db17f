#include <benchmark/benchmark.h>

#include "gspn/fabric.hpp"
#include "gspn/metrics.hpp"
#include "gspn/net_io.hpp"
#include "gspn/optimizer.hpp"
#include "gspn/simulator.hpp"

namespace {

using namespace gspn;

// Simulated seconds of the fabric model; reports firings per wall second.
void BM_SimulateFabric(benchmark::State& state) {
  auto params = default_params();
  params.lambda = static_cast<double>(state.range(0));
  params.batch_n = static_cast<std::uint32_t>(state.range(1));
  auto model = build_fabric_net(params);
  SimConfig config;
  config.horizon = 100.0;
  std::uint64_t firings = 0;
  for (auto _ : state) {
    auto trace = simulate(model.net, config);
    firings += trace.total_firings;
    benchmark::DoNotOptimize(trace);
    ++config.seed;
  }
  state.counters["firings/s"] = benchmark::Counter(static_cast<double>(firings), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateFabric)->Args({50, 1})->Args({160, 5})->Unit(benchmark::kMillisecond);

void BM_SystemReport(benchmark::State& state) {
  auto model = build_fabric_net(default_params());
  SimConfig config;
  config.horizon = 100.0;
  auto trace = simulate(model.net, config);
  for (auto _ : state) benchmark::DoNotOptimize(system_report(trace, model.labeling));
}
BENCHMARK(BM_SystemReport);

void BM_MinBatchParams(benchmark::State& state) {
  LatencyFit fit{25.06, 1.57, 1, 10, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(min_batch_params(143.0, fit));
}
BENCHMARK(BM_MinBatchParams);

void BM_NetRoundTrip(benchmark::State& state) {
  auto params = default_params();
  params.batch_n = 5;
  auto net = build_fabric_net(params).net;
  for (auto _ : state) benchmark::DoNotOptimize(parse_net(serialize_net(net)));
}
BENCHMARK(BM_NetRoundTrip);

}  // namespace
BENCHMARK_MAIN();
