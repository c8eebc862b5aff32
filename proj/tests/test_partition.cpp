#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/gallery.hpp"
#include "mgt/partition.hpp"

using namespace mgt;

namespace {

Box unit_square() { return Box{{0.0, 0.0}, {1.0, 1.0}}; }

// Jittered linear height maps keep the direct-versus-split decision close to
// the tie point, so the dp faces genuinely mixed cut sets across seeds.
SampledMap random_height_map(unsigned seed) {
  GridSpec grid(unit_square(), {17, 17});
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> slope(0.5, 1.5);
  const double a = slope(rng);
  const double b = slope(rng);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<double> samples(grid.count());
  for (std::size_t f = 0; f < grid.count(); ++f) {
    const auto p = grid.node(f);
    samples[f] = a * p[0] + b * p[1] + jitter(rng);
  }
  return SampledMap(grid, MetricSpace::euclidean(1), std::move(samples));
}

bool prefix_free(const std::vector<std::string>& addrs) {
  for (std::size_t i = 0; i < addrs.size(); ++i)
    for (std::size_t j = 0; j < addrs.size(); ++j) {
      if (i == j) continue;
      const auto& a = addrs[i];
      const auto& b = addrs[j];
      if (b.size() > a.size() && b.compare(0, a.size(), a) == 0 && b[a.size()] == '.')
        return false;
    }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("partition");

TEST_CASE("projection keeps the root cube at every depth") {
  const auto map = make_projection_map(2, 1, unit_square(), {129, 129});
  for (int depth : {0, 1, 3}) {
    const auto res = nm_content_dyadic(map, 1, 1, depth);
    CHECK(res.value == doctest::Approx(129.0 / 128.0).epsilon(1e-14));
    REQUIRE(res.cut_set.size() == 1);
    CHECK(res.cut_set[0] == "0");
    CHECK(res.per_cube[0].side == 1.0);
    CHECK(res.per_cube[0].term == res.value);
  }
}

TEST_CASE("fold map value stays at the root estimate") {
  const auto map = make_fold_map(3, {257, 257});
  const auto res = nm_content_dyadic(map, 1, 1, 5);
  // image [0, 2^-3] sampled at pitch 1/256: 33 occupied cells of width 1/256
  CHECK(res.value == doctest::Approx(33.0 / 256.0).epsilon(1e-14));
  CHECK(res.value <= std::pow(2.0, -3) + 0.02);
  REQUIRE(res.cut_set.size() == 1);
  CHECK(res.cut_set[0] == "0");
}

TEST_CASE("constant map has zero (n,m)-content") {
  const auto map = make_constant_map({0.3}, unit_square(), {33, 33});
  const auto res = nm_content_dyadic(map, 1, 1, 3);
  CHECK(res.value == 0.0);
  for (const auto& cube : res.per_cube) CHECK(cube.term == 0.0);
}

TEST_CASE("dp matches exhaustive enumeration on random height maps") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    const auto map = random_height_map(seed);
    const auto dp = nm_content_dyadic(map, 1, 1, 2);
    const auto brute = nm_content_enumerate(map, 1, 1, 2);
    CHECK(dp.value == doctest::Approx(brute.value).epsilon(1e-9));
    CHECK(dp.value <= brute.value + 1e-9);
  }
}

TEST_CASE("dp matches enumeration at depth 3") {
  const auto map = random_height_map(42);
  const auto dp = nm_content_dyadic(map, 1, 1, 3);
  const auto brute = nm_content_enumerate(map, 1, 1, 3);
  CHECK(dp.value == doctest::Approx(brute.value).epsilon(1e-9));
}

TEST_CASE("deeper trees never cost more") {
  const auto fold = make_fold_map(2, {129, 129});
  double prev = nm_content_dyadic(fold, 1, 1, 0).value;
  for (int depth = 1; depth <= 3; ++depth) {
    const double next = nm_content_dyadic(fold, 1, 1, depth).value;
    CHECK(next <= prev + 1e-9);
    prev = next;
  }
  for (unsigned seed = 100; seed < 105; ++seed) {
    CAPTURE(seed);
    const auto map = random_height_map(seed);
    const double root_only = nm_content_dyadic(map, 1, 1, 0).value;
    double last = root_only;
    for (int depth = 1; depth <= 2; ++depth) {
      const double next = nm_content_dyadic(map, 1, 1, depth).value;
      CHECK(next <= last + 1e-9);
      CHECK(next <= root_only + 1e-9);
      last = next;
    }
  }
}

TEST_CASE("cut sets tile the domain") {
  const auto map = random_height_map(7);
  const auto res = nm_content_dyadic(map, 1, 1, 2);
  CHECK(prefix_free(res.cut_set));
  double area = 0.0;
  double total = 0.0;
  for (const auto& cube : res.per_cube) {
    const int depth = static_cast<int>(std::count(cube.address.begin(), cube.address.end(), '.'));
    CHECK(cube.side == doctest::Approx(std::pow(0.5, depth)).epsilon(1e-14));
    CHECK(cube.term == doctest::Approx(cube.content_upper * cube.side).epsilon(1e-14));
    area += cube.side * cube.side;
    total += cube.term;
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total == doctest::Approx(res.value).epsilon(1e-12));
}

TEST_CASE("input validation") {
  const auto tall = make_projection_map(2, 1, Box{{0.0, 0.0}, {1.0, 2.0}}, {17, 33});
  CHECK_THROWS_AS(nm_content_dyadic(tall, 1, 1, 1), NonCubeDomain);

  const auto map = make_projection_map(2, 1, unit_square(), {9, 9});
  CHECK_THROWS_AS(nm_content_dyadic(map, 2, 1, 1), InvalidDims);
  CHECK_THROWS_AS(nm_content_dyadic(map, 0, 2, 1), InvalidDims);
  CHECK_THROWS_AS(nm_content_dyadic(map, 1, -1, 1), InvalidDims);
  CHECK_THROWS_AS(nm_content_dyadic(map, 1, 1, -1), InvalidSpec);
  CHECK_THROWS_AS(nm_content_dyadic(map, 1, 1, 4), DepthTooDeep);
  CHECK_NOTHROW(nm_content_dyadic(map, 1, 1, 3));

  // enumeration is an oracle for small trees only
  const auto fine = make_projection_map(2, 1, unit_square(), {129, 129});
  CHECK_THROWS_AS(nm_content_enumerate(fine, 1, 1, 4), InvalidSpec);
}

TEST_CASE("partition value sits under the density integral") {
  const double h = 1.0 / 128.0;
  LadderSpec ladder;
  ladder.radii = {51.5 * h, 25.5 * h, 12.5 * h};

  SUBCASE("projection") {
    const auto map = make_projection_map(2, 1, unit_square(), {129, 129});
    const auto rep = check_prop51(map, 1, 1, 3, ladder);
    CHECK(rep.lhs == doctest::Approx(129.0 / 128.0).epsilon(1e-14));
    CHECK(rep.rhs_density == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(rep.holds);
    CHECK(rep.slack == doctest::Approx(std::sqrt(2.0) - 129.0 / 128.0).epsilon(1e-12));
    REQUIRE(rep.jacobian_variant);
    CHECK(rep.rhs_jacobian == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rep.holds_jacobian);
  }

  SUBCASE("diagonal sum") {
    const auto map = make_linear_map({{1.0, 1.0}}, unit_square(), {129, 129});
    const auto rep = check_prop51(map, 1, 1, 3, ladder);
    CHECK(rep.lhs == doctest::Approx(2.0).epsilon(0.02));
    CHECK(rep.rhs_density == doctest::Approx(2.0).epsilon(0.05));
    CHECK(rep.holds);
    REQUIRE(rep.jacobian_variant);
    CHECK(rep.rhs_jacobian == doctest::Approx(2.0).epsilon(0.05));
    CHECK(rep.holds_jacobian);
  }

  SUBCASE("fold") {
    const double hf = 1.0 / 256.0;
    LadderSpec crease_safe;
    crease_safe.radii = {10.5 * hf, 5.5 * hf, 2.5 * hf};
    const auto map = make_fold_map(3, {257, 257});
    const auto rep = check_prop51(map, 1, 1, 5, crease_safe);
    CHECK(rep.lhs == doctest::Approx(33.0 / 256.0).epsilon(1e-14));
    CHECK(rep.rhs_density <= std::sqrt(2.0) * (1.0 + 1e-12));
    CHECK(rep.rhs_density >= 0.9);
    CHECK(rep.holds);
    REQUIRE(rep.jacobian_variant);
    CHECK(rep.holds_jacobian);
  }

  SUBCASE("constant") {
    const auto map = make_constant_map({0.3}, unit_square(), {33, 33});
    const auto rep = check_prop51(map, 1, 1, 2);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.rhs_density == 0.0);
    CHECK(rep.holds);
    CHECK(rep.slack == 0.0);
  }
}

TEST_SUITE_END();
