#include <benchmark/benchmark.h>

#include "mgt/chart.hpp"
#include "mgt/gallery.hpp"
#include "mgt/partition.hpp"

namespace {

void BM_DyadicPartition(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  auto map = mgt::make_fold_map(3, {257, 257});
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::nm_content_dyadic(map, 1, 1, depth));
  }
}
BENCHMARK(BM_DyadicPartition)->Arg(3)->Arg(5)->Arg(7);

void BM_EnumeratedPartition(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  auto map = mgt::make_projection_map(2, 1, mgt::Box{{0.0, 0.0}, {1.0, 1.0}}, {17, 17});
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::nm_content_enumerate(map, 1, 1, depth));
  }
}
BENCHMARK(BM_EnumeratedPartition)->Arg(1)->Arg(2);

void BM_ChartBuild(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  auto map = mgt::make_fold_map(2, {nodes, nodes});
  mgt::Vec center{0.125, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::build_chart(map, center, 1));
  }
}
BENCHMARK(BM_ChartBuild)->Arg(65)->Arg(257);

void BM_NormalFormVerify(benchmark::State& state) {
  const int stride = static_cast<int>(state.range(0));
  auto map = mgt::make_fold_map(2, {257, 257});
  const auto chart = mgt::build_chart(map, {0.125, 0.5}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::verify_normal_form(chart, map, stride));
  }
}
BENCHMARK(BM_NormalFormVerify)->Arg(8)->Arg(2)->Arg(1);

}  // namespace
