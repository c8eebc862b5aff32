#include <benchmark/benchmark.h>

#include <random>

#include "mgt/content.hpp"
#include "mgt/gallery.hpp"
#include "mgt/metric_space.hpp"

namespace {

std::vector<mgt::Vec> random_cloud(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<mgt::Vec> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

void BM_PixelContent(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  auto map = mgt::make_projection_map(2, 2, mgt::Box{{0.0, 0.0}, {1.0, 1.0}}, {nodes, nodes});
  auto pts = mgt::image_points(map);
  mgt::ContentOptions opts;
  opts.rho = mgt::default_inflation(map);
  auto target = map.target();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::content_estimate(target, pts, 2, opts));
  }
}
BENCHMARK(BM_PixelContent)->Arg(65)->Arg(129)->Arg(257);

void BM_GreedyClusters(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  auto pts = random_cloud(count, 42);
  auto space = mgt::MetricSpace::euclidean(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::content_greedy(space, pts, 0.05, 1));
  }
}
BENCHMARK(BM_GreedyClusters)->Arg(32)->Arg(128)->Arg(512);

void BM_OracleClusters(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  auto pts = random_cloud(count, 7);
  auto space = mgt::MetricSpace::euclidean(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::content_oracle_exact(space, pts, 0.05, 1));
  }
}
BENCHMARK(BM_OracleClusters)->Arg(6)->Arg(9)->Arg(12);

}  // namespace
