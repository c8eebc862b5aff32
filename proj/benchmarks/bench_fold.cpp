#include <benchmark/benchmark.h>

#include "mgt/gallery.hpp"

namespace {

void BM_FoldEval(benchmark::State& state) {
  const int stages = static_cast<int>(state.range(0));
  auto map = mgt::make_fold_map(stages, {33, 33});
  mgt::Vec p{0.37, 0.61};
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.evaluate(p));
  }
}
BENCHMARK(BM_FoldEval)->Arg(2)->Arg(6)->Arg(12);

void BM_SliceCapacity(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  auto map = mgt::make_fold_map(3, {nodes, 3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::fold_slice_capacity(map, 1.5, 0.5));
  }
}
BENCHMARK(BM_SliceCapacity)->Arg(129)->Arg(513);

}  // namespace
