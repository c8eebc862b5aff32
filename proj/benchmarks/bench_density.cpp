#include <benchmark/benchmark.h>

#include "mgt/density.hpp"
#include "mgt/gallery.hpp"
#include "mgt/jacobian.hpp"

namespace {

mgt::LadderSpec wide_ladder(double h) {
  mgt::LadderSpec s;
  s.radii = {25.5 * h, 12.5 * h};
  return s;
}

void BM_DensityProfile(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  auto map = mgt::make_projection_map(2, 1, mgt::Box{{0.0, 0.0}, {1.0, 1.0}}, {nodes, nodes});
  const auto ladder = wide_ladder(map.grid().max_spacing());
  mgt::Vec x{0.5, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::density_profile(map, x, 1, ladder));
  }
}
BENCHMARK(BM_DensityProfile)->Arg(65)->Arg(129)->Arg(257);

void BM_DensityField(benchmark::State& state) {
  const int stride = static_cast<int>(state.range(0));
  auto map = mgt::make_projection_map(2, 1, mgt::Box{{0.0, 0.0}, {1.0, 1.0}}, {129, 129});
  const auto ladder = wide_ladder(map.grid().max_spacing());
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::density_field(map, stride, 1, ladder));
  }
}
BENCHMARK(BM_DensityField)->Arg(32)->Arg(16)->Arg(8);

void BM_DensityVsJacobian(benchmark::State& state) {
  const int stride = static_cast<int>(state.range(0));
  auto map = mgt::make_fold_map(3, {257, 257});
  mgt::LadderSpec ladder;
  const double h = map.grid().max_spacing();
  ladder.radii = {10.5 * h, 5.5 * h, 2.5 * h};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::check_density_equals_jacobian(map, stride, ladder, 0.05));
  }
}
// stride 32 would land every probe on a crease and leave nothing comparable
BENCHMARK(BM_DensityVsJacobian)->Arg(16)->Arg(8);

}  // namespace
