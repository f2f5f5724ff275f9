#include <limits>

#include <benchmark/benchmark.h>

#include "macsort/assignment.hpp"
#include "macsort/mac_sort.hpp"
#include "macsort/synth.hpp"

using namespace macsort;

namespace {

CostMatrix random_costs(int rows, int cols, std::uint64_t seed, double gate_fraction) {
  SplitMix64 rng(seed);
  CostMatrix c(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      c(r, k) = rng.uniform() < gate_fraction ? std::numeric_limits<double>::infinity() : rng.uniform();
    }
  }
  return c;
}

Scenario crowd(int objects, int frames, int dim) {
  ScenarioSpec spec;
  spec.seed = 5;
  spec.n_objects = objects;
  spec.n_frames = frames;
  spec.embedding_dim = dim;
  spec.motion = MotionModel::Circular;
  spec.speed = 2.0;
  spec.detection_noise_px = 1.0;
  return generate(spec);
}

void BM_LinearAssignmentDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CostMatrix c = random_costs(n, n, 1, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(linear_assignment(c));
  state.SetComplexityN(n);
}
BENCHMARK(BM_LinearAssignmentDense)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_LinearAssignmentGated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CostMatrix c = random_costs(n, n, 2, 0.95);
  for (auto _ : state) benchmark::DoNotOptimize(linear_assignment(c));
}
BENCHMARK(BM_LinearAssignmentGated)->RangeMultiplier(2)->Range(8, 256);

void BM_BuildCostMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scenario sc = crowd(n, 5, 128);
  MacSortTracker tracker;
  for (int f = 1; f <= 4; ++f) tracker.step(f, sc.frame_detections(f));
  const auto dets = sc.frame_detections(5);
  const AssocConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(build_cost_matrix(tracker.tracks(), dets, cfg));
}
BENCHMARK(BM_BuildCostMatrix)->Arg(10)->Arg(50)->Arg(100);

void BM_TrackerStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int frames = 200;
  const Scenario sc = crowd(n, frames, 128);
  std::vector<std::vector<Detection>> per_frame;
  for (int f = 1; f <= frames; ++f) per_frame.push_back(sc.frame_detections(f));
  for (auto _ : state) {
    MacSortTracker tracker;
    for (int f = 1; f <= frames; ++f) benchmark::DoNotOptimize(tracker.step(f, per_frame[f - 1]));
  }
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_TrackerStep)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
