#include <benchmark/benchmark.h>

#include "hubscan/metrics.hpp"
#include "hubscan/pipeline.hpp"

namespace {

using hubscan::DataMatrix;
using hubscan::GroundTruthModel;
using hubscan::IpchdConfig;
using hubscan::KappaMode;
using hubscan::SimConfig;
using hubscan::SMode;
using hubscan::SymmetricMatrix;

SimConfig strong(int p, std::uint64_t seed) {
  SimConfig cfg;
  cfg.p = p;
  cfg.t = p;
  cfg.r = 5;
  cfg.p_hub = 0.8;
  cfg.p_nonhub = 0.05;
  cfg.p_nonsignal = 0.005;
  cfg.delta = 5.0;
  cfg.seed = seed;
  return cfg;
}

void BM_SymmetricEigen(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const GroundTruthModel model = generate_precision(strong(p, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(symmetric_eigen(model.corr));
  }
}
BENCHMARK(BM_SymmetricEigen)->Arg(100)->Arg(200)->Arg(500);

void BM_GeneratePrecision(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_precision(strong(p, ++seed)));
  }
}
BENCHMARK(BM_GeneratePrecision)->Arg(100)->Arg(200);

void BM_SampleGaussian(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const GroundTruthModel model = generate_precision(strong(p, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian(model, p, 7));
  }
}
BENCHMARK(BM_SampleGaussian)->Arg(100)->Arg(200);

void BM_DetectThresholded(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const GroundTruthModel model = generate_precision(strong(p, 3));
  const DataMatrix x = sample_gaussian(model, p, 7);
  IpchdConfig cfg;
  cfg.s_mode = SMode::kOverEstimated;
  cfg.kappa_mode = KappaMode::kTwoSd;
  for (auto _ : state) {
    const SymmetricMatrix r = sample_correlation(x);
    const auto mask = threshold_mask(r, 0.65, x.n());
    benchmark::DoNotOptimize(detect(apply_mask(mask, r), cfg));
  }
}
BENCHMARK(BM_DetectThresholded)->Arg(100)->Arg(200)->Arg(500);

void BM_GridReplicate(benchmark::State& state) {
  hubscan::GridSpec spec;
  spec.p_values = {static_cast<int>(state.range(0))};
  spec.replicates = 1;
  spec.base_seed = 7;
  spec.measure_time = false;
  spec.threads = 1;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    spec.base_seed = ++seed;
    benchmark::DoNotOptimize(run_grid(spec));
  }
}
BENCHMARK(BM_GridReplicate)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
