#include <benchmark/benchmark.h>

#include <random>

#include "mrmr/circles.hpp"
#include "mrmr/cues.hpp"
#include "mrmr/planner.hpp"

using namespace mrmr;

namespace {

// Square rooms of `room` cells with a five-cell door in every shared wall.
BinaryMap floor_plan(int n, int room = 40) {
  BinaryMap b(n, n, 0.2, 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const bool wx = x % room == 0 || x == n - 1, wy = y % room == 0 || y == n - 1;
      const int mid = room / 2;
      const bool dx = wx && x > 0 && x < n - 1 && y % room >= mid - 2 && y % room <= mid + 2;
      const bool dy = wy && y > 0 && y < n - 1 && x % room >= mid - 2 && x % room <= mid + 2;
      if ((wx && !dx) || (wy && !dy)) b(x, y) = 1;
    }
  }
  return b;
}

KnownMap known_floor(int n, int nz = 10) {
  const BinaryMap b = floor_plan(n);
  KnownMap k(GridSpec{n, n, nz, 0.2});
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      for (int z = 0; z < nz; ++z) k.mark({x, y, z}, b(x, y) ? VoxelState::occupied : VoxelState::free);
    }
  }
  return k;
}

void BM_DistanceTransform(benchmark::State& state) {
  const BinaryMap b = floor_plan(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_transform(b));
  state.SetItemsProcessed(state.iterations() * b.width() * b.height());
}
BENCHMARK(BM_DistanceTransform)->Arg(64)->Arg(200)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_Hessian(benchmark::State& state) {
  const DistanceField m = distance_transform(floor_plan(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(hessian(m));
}
BENCHMARK(BM_Hessian)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_ExtractCuesBinary(benchmark::State& state) {
  const BinaryMap b = floor_plan(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_cues(b, CueConfig{}));
}
BENCHMARK(BM_ExtractCuesBinary)->Arg(200)->Unit(benchmark::kMillisecond);

// Includes flattening the 3D map.
void BM_ExtractCuesKnownMap(benchmark::State& state) {
  const KnownMap k = known_floor(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_cues(k, CueConfig{}));
}
BENCHMARK(BM_ExtractCuesKnownMap)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_UpdateCircles(benchmark::State& state) {
  const CueSet cues = extract_cues(floor_plan(200), CueConfig{});
  const auto candidates = candidates_from(cues.maxima);
  const CircleSet seed = update_circles({}, candidates);
  for (auto _ : state) benchmark::DoNotOptimize(update_circles(seed, candidates));
  state.counters["circles"] = static_cast<double>(seed.size());
}
BENCHMARK(BM_UpdateCircles)->Unit(benchmark::kMicrosecond);

void BM_RandomCandidates(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 40.0), rad(0.3, 4.0);
  std::vector<CircleCandidate> cands;
  for (int i = 0; i < state.range(0); ++i) cands.push_back({{pos(rng), pos(rng)}, rad(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(update_circles({}, cands));
}
BENCHMARK(BM_RandomCandidates)->Arg(25)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_PlanAcrossFloor(benchmark::State& state) {
  const BinaryMap b = floor_plan(200);
  PlanarMap m(200, 200, 0.2, PlanarState::free);
  for (int y = 0; y < 200; ++y) {
    for (int x = 0; x < 200; ++x) {
      if (b(x, y)) m(x, y) = PlanarState::occupied;
    }
  }
  const CostMap costs(m, PlannerConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(plan_path(costs, m.center({5, 5}), m.center({194, 194})));
}
BENCHMARK(BM_PlanAcrossFloor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
