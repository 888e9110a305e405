#include <benchmark/benchmark.h>

#include <vector>

#include "owl3d/ood_metrics.hpp"
#include "owl3d/rng.hpp"

namespace {

void BM_Auroc(benchmark::State& state) {
  owl3d::CounterRng rng(5, "bench-auroc");
  std::vector<double> id(state.range(0)), ood(state.range(0));
  for (auto& v : id) v = rng.normal() + 0.5;
  for (auto& v : ood) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(owl3d::ood::auroc(id, ood));
    benchmark::DoNotOptimize(owl3d::ood::aupr(id, ood));
    benchmark::DoNotOptimize(owl3d::ood::fpr_at_tpr(id, ood));
  }
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);

void BM_EnergyScore(benchmark::State& state) {
  const std::vector<double> logits{1.5, -0.3, 2.2, 0.1};
  const owl3d::ood::ScoreMetric metric{owl3d::ood::ScoreKind::kEnergy, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(owl3d::ood::id_score(logits, metric));
}
BENCHMARK(BM_EnergyScore);

}  // namespace
