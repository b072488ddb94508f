#include <benchmark/benchmark.h>

#include "bvoc/calibration.hpp"
#include "bvoc/experiments.hpp"
#include "bvoc/presets.hpp"
#include "bvoc/receiver.hpp"
#include "bvoc/transmitter.hpp"

namespace {

void BM_LeafConcentration(benchmark::State& state) {
  const bvoc::channel::ChannelParams chan{};
  const bvoc::receiver::LeafParams leaf;
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bvoc::receiver::leaf_concentration(leaf, chan, 1.1e-9, {x, 0.0, 1.0}, 0.05));
    x = x < 2.0 ? x + 1e-4 : 0.1;
  }
}
BENCHMARK(BM_LeafConcentration);

void BM_SimulateEmission(benchmark::State& state) {
  const bvoc::transmitter::GeneParams gene{1.0, 0.5, 1.0, 2.0};
  const bvoc::transmitter::StressProfile stress({0.0, 1.0});
  for (auto _ : state)
    benchmark::DoNotOptimize(bvoc::transmitter::simulate_emission(gene, stress, 0.0, 10.0, 0.01, 0.0));
}
BENCHMARK(BM_SimulateEmission);

// Arg: trials per grid point.
void BM_DistanceSweep(benchmark::State& state) {
  auto cfg = bvoc::presets::get("distance");
  cfg.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bvoc::experiments::run_analysis(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.trials * cfg.grid.points));
}
BENCHMARK(BM_DistanceSweep)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FitGeneParams(benchmark::State& state) {
  const bvoc::transmitter::GeneParams truth{1.0, 0.5, 1.0, 2.0};
  const bvoc::transmitter::StressProfile stress({0.0, 1.0});
  bvoc::calibration::TimeSeries data;
  for (int i = 0; i <= 100; ++i) data.times.push_back(0.1 * i);
  data.values = bvoc::transmitter::emission_rate_at(truth, stress, data.times, 0.0, 0.01);
  bvoc::calibration::FitOptions opt;
  opt.v_max = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(bvoc::calibration::fit_gene_params(data, stress, opt));
}
BENCHMARK(BM_FitGeneParams)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
