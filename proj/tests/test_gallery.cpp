#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/gallery.hpp"

using namespace mgt;

namespace {

// Independent closed form for the composed reflection map: folding N times
// and projecting leaves the distance to the lattice (2^(1-N)) Z.
double fold_closed_form(int stages, double x) {
  const double period = std::ldexp(1.0, 1 - stages);
  const double nearest = period * std::round(x / period);
  return std::fabs(x - nearest);
}

Box unit_square() { return Box{{0.0, 0.0}, {1.0, 1.0}}; }

}  // namespace

TEST_SUITE_BEGIN("gallery");

TEST_CASE("single reflection stage") {
  auto a = fold_stage(1, 0.25, 0.75);
  CHECK(a[0] == doctest::Approx(0.25));
  CHECK(a[1] == doctest::Approx(0.25));
  auto b = fold_stage(2, 0.4, 0.1);
  CHECK(b[0] == doctest::Approx(0.1));
  CHECK(b[1] == doctest::Approx(0.1));
  CHECK_THROWS_AS(fold_stage(0, 0.1, 0.1), InvalidSpec);
}

TEST_CASE("composed fold equals the lattice-distance closed form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int stages = 1; stages <= 5; ++stages) {
    auto m = make_fold_map(stages, {9, 9});
    for (int i = 0; i < 500; ++i) {
      const double x = u(rng), y = u(rng);
      const double got = m.evaluate(Vec{x, y})[0];
      CHECK(got == doctest::Approx(fold_closed_form(stages, x)).epsilon(1e-14));
      CHECK(got >= 0.0);
      CHECK(got <= std::ldexp(1.0, -stages) + 1e-15);
    }
    // the value depends only on x
    CHECK(m.evaluate(Vec{0.3, 0.1})[0] == doctest::Approx(m.evaluate(Vec{0.3, 0.9})[0]));
  }
}

TEST_CASE("fold crease geometry") {
  auto m = make_fold_map(3, {5, 5});
  // creases at multiples of 1/8
  CHECK(m.crease_distance(Vec{0.25, 0.3}) == doctest::Approx(0.0));
  CHECK(m.crease_distance(Vec{0.26, 0.3}) == doctest::Approx(0.01));
  CHECK(m.crease_distance(Vec{0.3, 0.99}) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(m.lip_hint() == 1.0);
}

TEST_CASE("fold smooth model extends the local branch") {
  auto m = make_fold_map(2, {5, 5});
  // branch through x = 0.6: descending toward the valley at 0.5
  auto model = m.smooth_model_at(Vec{0.6, 0.4});
  REQUIRE(model);
  CHECK(model->affine());
  Vec out(1);
  model->eval(Vec{0.6, 0.4}, out);
  CHECK(out[0] == doctest::Approx(m.evaluate(Vec{0.6, 0.4})[0]));
  // the model keeps the branch formula outside the branch
  model->eval(Vec{0.8, 0.4}, out);
  CHECK(out[0] == doctest::Approx(0.3));

  // ascending branch
  auto up = m.smooth_model_at(Vec{0.05, 0.5});
  up->eval(Vec{0.05, 0.5}, out);
  CHECK(out[0] == doctest::Approx(0.05));
  up->eval(Vec{0.3, 0.5}, out);
  CHECK(out[0] == doctest::Approx(0.3));
}

TEST_CASE("smooth maps are their own model") {
  auto m = make_linear_map({{1.0, 0.0}}, unit_square(), {3, 3});
  CHECK(m.smooth_model_at(Vec{0.5, 0.5}) == m.rule_ptr());
  CHECK(m.crease_distance(Vec{0.5, 0.5}) == std::numeric_limits<double>::infinity());
}

TEST_CASE("projection, poly and constant rules") {
  auto pr = make_projection_map(3, 2, Box{{0, 0, 0}, {1, 1, 1}}, {3, 3, 3});
  auto y = pr.evaluate(Vec{0.2, 0.4, 0.9});
  CHECK(y == Vec{0.2, 0.4});
  CHECK(pr.lip_hint() == 1.0);
  CHECK_THROWS_AS(make_projection_map(2, 3, unit_square(), {3, 3}), InvalidDims);

  // f(x, y) = (x^2, x y + 2)
  std::vector<std::vector<PolyTerm>> comps{
      {{1.0, {2, 0}}},
      {{1.0, {1, 1}}, {2.0, {0, 0}}},
  };
  auto poly = make_poly_map(comps, unit_square(), {5, 5});
  auto v = poly.evaluate(Vec{0.5, 0.25});
  CHECK(v[0] == doctest::Approx(0.25));
  CHECK(v[1] == doctest::Approx(2.125));
  CHECK_THROWS_AS(make_poly_map({{{1.0, {1}}}}, unit_square(), {3, 3}), DimensionMismatch);

  auto c = make_constant_map(Vec{3.0, 1.0}, unit_square(), {3, 3});
  CHECK(c.evaluate(Vec{0.7, 0.1}) == Vec{3.0, 1.0});
  CHECK(c.effective_lipschitz() == 0.0);
}

TEST_CASE("affine offset and hint") {
  auto m = make_affine_map({{0.0, 2.0}}, Vec{5.0}, unit_square(), {3, 3});
  CHECK(m.evaluate(Vec{0.5, 0.5})[0] == doctest::Approx(6.0));
  CHECK(*m.lip_hint() == doctest::Approx(2.0));
}

TEST_CASE("kuratowski image map preserves node distances for stride 1") {
  auto base = make_linear_map({{1.0, 0.0}, {0.0, 1.0}}, unit_square(), {5, 5});
  auto emb = make_kuratowski_image_map(base, 1);
  CHECK(emb.target().kind() == SpaceKind::SupNorm);
  CHECK(emb.target_dim() == 25);
  for (std::size_t i : {0u, 7u, 12u, 24u}) {
    for (std::size_t j : {3u, 11u, 24u}) {
      const double want = euclid_dist(base.node_image(i), base.node_image(j));
      const double got = sup_dist(emb.node_image(i), emb.node_image(j));
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
  // embedding a coordinate space never expands distances
  CHECK(emb.lipschitz_axis_estimate() <= base.lipschitz_axis_estimate() + 1e-12);
}

TEST_CASE("manifest round trip, closed form") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "mgt_fold_manifest.json").string();
  auto m = make_fold_map(3, {17, 17});
  save_map_manifest(m, path);
  auto back = load_map_manifest(path);
  CHECK(back.grid().nodes() == m.grid().nodes());
  CHECK(back.rule().kind() == "fold");
  for (std::size_t f : {0u, 5u, 100u, 288u}) {
    CHECK(back.node_image(f)[0] == m.node_image(f)[0]);
  }
  std::remove(path.c_str());
}

TEST_CASE("manifest round trip, sampled grid") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "mgt_grid_manifest.json").string();
  GridSpec g(Box{{0.0}, {1.0}}, {9});
  std::vector<double> samples;
  for (int i = 0; i < 9; ++i) samples.push_back(std::sin(i * 0.3));
  SampledMap m(g, MetricSpace::euclidean(1), samples, 3.0);
  save_map_manifest(m, path);
  auto back = load_map_manifest(path);
  CHECK(back.has_rule());
  CHECK(back.rule().kind() == "grid");
  CHECK(back.lip_hint() == 3.0);
  for (std::size_t f = 0; f < 9; ++f) {
    CHECK(back.node_image(f)[0] == m.node_image(f)[0]);
  }
  std::remove(path.c_str());
  std::remove((dir / "mgt_grid_manifest-samples.csv").string().c_str());
}

TEST_CASE("manifest dispatch rejects unknown kinds") {
  CHECK_THROWS_AS(make_map_json(R"({"kind":"mystery","grid":[3],"box":{"lo":[0],"hi":[1]}})"),
                  InvalidSpec);
  CHECK_THROWS_AS(make_map_json("not json"), InvalidSpec);
  CHECK(gallery_kinds().size() == 7);
}

TEST_CASE("fold area bound") {
  CHECK(fold_K_bound(1.0, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(fold_K_bound(2.0, 3) == doctest::Approx(16.0 * 0.25 * std::sqrt(2.0)));
  CHECK_THROWS_AS(fold_K_bound(0.5, 3), InvalidLambda);
  CHECK_THROWS_AS(fold_K_bound(2.0, 0), InvalidSpec);
}

TEST_CASE("slice capacity counts one monotone branch") {
  // 257 nodes, h = 1/256; f(x) = dist(x, Z/4) rises on [0, 1/8] (nodes 0..32)
  // and the greedy scan keeps exactly that branch: every later node clashes
  // with some accepted one. Filled in, the branch has length 32h = 1/8.
  auto m = make_fold_map(3, {257, 5});
  const double cap = fold_slice_capacity(m, 1.0 + 1e-9, 0.5);
  CHECK(cap == doctest::Approx(0.125).epsilon(1e-14));
  const double h = 1.0 / 256.0;
  CHECK(cap <= 0.125 * (1.0 + 5.0 * h));
  CHECK(cap >= 0.125 * (1.0 - 5.0 * h));
  CHECK_THROWS_AS(fold_slice_capacity(m, 1.0, 0.5), InvalidLambda);
}

TEST_CASE("fiber integral bound constant") {
  // n = 2, m = 1: w_1 w_1 / w_2 = 4 / pi
  const double pi = 4.0 * std::atan(1.0);
  CHECK(coarea_rhs(2, 1, 1.0, 1.0) == doctest::Approx(4.0 / pi));
  CHECK(coarea_rhs(2, 1, std::sqrt(2.0), 0.5) ==
        doctest::Approx(std::sqrt(2.0) * 4.0 / pi * 0.5));
  CHECK(coarea_rhs(3, 0, 9.0, 2.0) == doctest::Approx(2.0));  // m = 0 is the identity bound
  CHECK_THROWS_AS(coarea_rhs(2, 3, 1.0, 1.0), InvalidDims);
  CHECK_THROWS_AS(coarea_rhs(2, 1, -1.0, 1.0), InvalidSpec);
}

TEST_SUITE_END();
