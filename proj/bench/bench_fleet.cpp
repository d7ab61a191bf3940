#include <benchmark/benchmark.h>

#include "bdperiod/simulator.hpp"

using namespace bdperiod;

namespace {

ChainSpec period_two() { return ChainSpec::build({{0.0, 0.5, 0.5}}, tail::Constant{0.7, 0.3, 0.0}); }

SimulationConfig config(std::int64_t steps) {
  SimulationConfig c;
  c.steps = static_cast<std::uint64_t>(steps);
  c.burn_in = c.steps / 10;
  c.moduli = {2, 3, 4};
  return c;
}

void BM_FleetSerial(benchmark::State& state) {
  const ChainSpec chain = period_two();
  const auto seeds = fleet_seeds(7, 16);
  const SimulationConfig c = config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_fleet_serial(chain, c, seeds));
  state.SetItemsProcessed(state.iterations() * 16 * state.range(0));
}

void BM_FleetOpenMP(benchmark::State& state) {
  const ChainSpec chain = period_two();
  const auto seeds = fleet_seeds(7, 16);
  const SimulationConfig c = config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_fleet(chain, c, seeds));
  state.SetItemsProcessed(state.iterations() * 16 * state.range(0));
}

}  // namespace

BENCHMARK(BM_FleetSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FleetOpenMP)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
