#include <benchmark/benchmark.h>

#include "tristat/analysis.hpp"
#include "tristat/calibration.hpp"
#include "tristat/noise_model.hpp"
#include "tristat/scenario.hpp"
#include "tristat/simulator.hpp"

namespace {

using namespace tristat;

void BM_Covariance(benchmark::State& state) {
  const NoiseModel model = NoiseModel::WithinPanel();
  Tristimulus c(41.2, 21.3, 1.9);
  for (auto _ : state) benchmark::DoNotOptimize(covariance(model, c));
}
BENCHMARK(BM_Covariance);

void BM_FitMatrix(benchmark::State& state) {
  std::vector<MeasurementPair> pairs;
  const auto palette = standard_palette(static_cast<std::size_t>(state.range(0)));
  for (const auto& c : palette) {
    pairs.push_back({c.xyz, Tristimulus::FromVector(c.xyz.vec() * 1.01), c.id});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_matrix(pairs, NoiseModel::BetweenPanel(), Weighting::kProposed));
  }
}
BENCHMARK(BM_FitMatrix)->Arg(4)->Arg(20)->Arg(342);

void BM_RunCampaign(benchmark::State& state) {
  CampaignSpec spec = default_scenario().campaign;
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(run_campaign(spec));
  }
}
BENCHMARK(BM_RunCampaign)->Unit(benchmark::kMillisecond);

void BM_WithinFit(benchmark::State& state) {
  const auto datasets = group_by_panel(run_campaign(default_scenario().campaign).records);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_noise_model(within_panel_directional_stds(datasets)));
  }
}
BENCHMARK(BM_WithinFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
