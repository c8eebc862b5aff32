#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mgt/gallery.hpp"
#include "mgt/jacobian.hpp"

using namespace mgt;

namespace {

Box unit_square() { return Box{{0.0, 0.0}, {1.0, 1.0}}; }

// sqrt(det D D^T) for a 2-row sample, straight from the Gram entries
double gram_jacobian2(const DerivativeSample& d) {
  double a = 0.0, b = 0.0, c = 0.0;
  for (int j = 0; j < d.cols; ++j) {
    a += d.entry(0, j) * d.entry(0, j);
    b += d.entry(0, j) * d.entry(1, j);
    c += d.entry(1, j) * d.entry(1, j);
  }
  return std::sqrt(std::max(0.0, a * c - b * b));
}

}  // namespace

TEST_SUITE_BEGIN("jacobian");

TEST_CASE("affine rules difference exactly, anywhere in the box") {
  const auto map = make_linear_map({{1.0, 2.0}, {3.0, 4.0}}, unit_square(), {17, 17});
  for (const Vec& x : {Vec{0.5, 0.5}, Vec{0.0, 0.0}, Vec{1.0, 0.25}}) {
    const auto d = approx_derivative(map, x);
    CHECK(d.h_fd == 0.0);
    CHECK(d.entry(0, 0) == 1.0);
    CHECK(d.entry(0, 1) == 2.0);
    CHECK(d.entry(1, 0) == 3.0);
    CHECK(d.entry(1, 1) == 4.0);
    CHECK(d.rank_estimate == 2);
  }
}

TEST_CASE("central differences are second order on smooth rules") {
  // d/dx x^2 at 1: the cubic truncation term vanishes only in exact
  // arithmetic stepwise; here the error is pure rounding
  const auto square = make_poly_map({{PolyTerm{1.0, {2}}}}, Box{{0.0}, {2.0}}, {33}, 4.0);
  const auto d = approx_derivative(square, {1.0}, 1e-4);
  CHECK(std::abs(d.entry(0, 0) - 2.0) <= 1e-7);

  // x^3 has truncation error exactly h^2, so halving the step quarters it
  const auto cubic = make_poly_map({{PolyTerm{1.0, {3}}}}, Box{{0.0}, {1.0}}, {33}, 3.0);
  const double exact = 3.0 * 0.25;  // derivative at 1/2
  const double e1 = std::abs(approx_derivative(cubic, {0.5}, 2e-2).entry(0, 0) - exact);
  const double e2 = std::abs(approx_derivative(cubic, {0.5}, 1e-2).entry(0, 0) - exact);
  REQUIRE(e2 > 0.0);
  const double factor = e1 / e2;
  CHECK(factor >= 2.5);
  CHECK(factor <= 6.0);
}

TEST_CASE("fold derivative is a signed axis vector inside a branch") {
  // a wider step keeps the cancellation error tiny; any step inside the
  // branch differences the affine piece exactly in real arithmetic
  const auto map = make_fold_map(2, {65, 65});
  const auto up = approx_derivative(map, {0.1, 0.5}, 1e-3);
  CHECK(std::abs(up.entry(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(up.entry(0, 1)) <= 1e-12);
  const auto down = approx_derivative(map, {0.3, 0.5}, 1e-3);
  CHECK(std::abs(down.entry(0, 0) + 1.0) <= 1e-12);
  CHECK(std::abs(down.entry(0, 1)) <= 1e-12);
}

TEST_CASE("grid-presented maps difference through the interpolant") {
  // samples of an affine map interpolate exactly, so the FD matrix is the
  // matrix again up to rounding
  const auto rule_map = make_linear_map({{2.0, -1.0}}, unit_square(), {33, 33});
  std::vector<double> samples;
  for (std::size_t f = 0; f < rule_map.grid().count(); ++f) {
    const auto img = rule_map.node_image(f);
    samples.insert(samples.end(), img.begin(), img.end());
  }
  const SampledMap gridded(rule_map.grid(), MetricSpace::euclidean(1), std::move(samples));
  const auto d = approx_derivative(gridded, {0.5, 0.5});
  CHECK(d.h_fd == doctest::Approx(2.0 / 32.0));
  CHECK(std::abs(d.entry(0, 0) - 2.0) <= 1e-9);
  CHECK(std::abs(d.entry(0, 1) + 1.0) <= 1e-9);
}

TEST_CASE("jacobian_n matches hand values and the rank convention") {
  const auto diag = approx_derivative(make_linear_map({{1.0, 1.0}}, unit_square(), {9, 9}),
                                      {0.5, 0.5});
  CHECK(jacobian_n(diag, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const auto eye = approx_derivative(
      make_linear_map({{1.0, 0.0}, {0.0, 1.0}}, unit_square(), {9, 9}), {0.5, 0.5});
  CHECK(jacobian_n(eye, 2) == doctest::Approx(1.0).epsilon(1e-12));

  const auto rect = approx_derivative(
      make_linear_map({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}},
                      Box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {5, 5, 5}),
      {0.5, 0.5, 0.5});
  CHECK(jacobian_n(rect, 2) == doctest::Approx(2.0).epsilon(1e-12));

  const auto flat = approx_derivative(
      make_linear_map({{1.0, 0.0}, {2.0, 0.0}}, unit_square(), {9, 9}), {0.5, 0.5});
  CHECK(flat.rank_estimate == 1);
  CHECK(jacobian_n(flat, 2) == 0.0);

  CHECK_THROWS_AS(jacobian_n(eye, 1), DimensionMismatch);
  CHECK_THROWS_AS(jacobian_n(eye, 0), InvalidDims);
}

TEST_CASE("singular-value product agrees with the Gram determinant") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::vector<std::vector<double>> m = {
        {coef(rng), coef(rng), coef(rng)}, {coef(rng), coef(rng), coef(rng)}};
    const auto d = approx_derivative(
        make_linear_map(m, Box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {3, 3, 3}),
        {0.5, 0.5, 0.5});
    CHECK(d.rank_estimate <= 2);
    const double viaSvd = d.singular_values[0] * d.singular_values[1];
    const double viaGram = gram_jacobian2(d);
    CHECK(std::abs(viaSvd - viaGram) <= 1e-9 * std::max(1.0, viaGram));
    if (d.rank_estimate == 2) {
      CHECK(std::abs(jacobian_n(d, 2) - viaGram) <= 1e-9 * std::max(1.0, viaGram));
    }
  }
}

TEST_CASE("permuting target components preserves the spectrum") {
  const std::vector<std::vector<double>> m = {{1.0, 2.0, 0.5}, {0.0, 1.0, -1.0}, {3.0, 0.0, 1.0}};
  const std::vector<std::vector<double>> p = {m[2], m[0], m[1]};
  const Box cube{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  const auto a = approx_derivative(make_linear_map(m, cube, {3, 3, 3}), {0.5, 0.5, 0.5});
  const auto b = approx_derivative(make_linear_map(p, cube, {3, 3, 3}), {0.5, 0.5, 0.5});
  REQUIRE(a.singular_values.size() == b.singular_values.size());
  for (std::size_t i = 0; i < a.singular_values.size(); ++i) {
    CHECK(std::abs(a.singular_values[i] - b.singular_values[i]) <= 1e-12);
  }
  CHECK(std::abs(jacobian_n(a, 3) - jacobian_n(b, 3)) <= 1e-12);
}

TEST_CASE("derivative validation") {
  const auto map = make_fold_map(2, {33, 33});
  CHECK_THROWS_AS(approx_derivative(map, {1.5, 0.5}), OutOfDomain);
  CHECK_THROWS_AS(approx_derivative(map, {0.5}), DimensionMismatch);
  // non-affine rule needs the step inside the box
  CHECK_THROWS_AS(approx_derivative(map, {0.5, 1.0}, 1e-3), OutOfDomain);

  const auto explicit_target = [] {
    // four points on a path metric, presented as an explicit matrix space
    std::vector<double> d = {0, 1, 2, 3, 1, 0, 1, 2, 2, 1, 0, 1, 3, 2, 1, 0};
    return MetricSpace::explicit_matrix(std::move(d), {"a", "b", "c", "d"});
  }();
  std::vector<double> samples;
  for (int i = 0; i < 9; ++i) samples.push_back(static_cast<double>(i % 4));
  const SampledMap to_explicit(GridSpec(Box{{0.0}, {1.0}}, {9}), explicit_target,
                               std::move(samples));
  CHECK_THROWS_AS(approx_derivative(to_explicit, {0.5}), NonComponentTarget);
}

TEST_CASE("density brackets the jacobian across the gallery") {
  const double h = 1.0 / 128.0;
  LadderSpec wide;
  wide.radii = {25.5 * h, 12.5 * h};

  const auto proj = check_density_equals_jacobian(
      make_projection_map(2, 1, unit_square(), {129, 129}), 16, wide);
  CHECK(proj.pass_fraction == 1.0);
  CHECK(proj.max_gap == 0.0);
  REQUIRE(proj.points.size() >= 25);

  const auto sum = check_density_equals_jacobian(
      make_linear_map({{1.0, 1.0}}, unit_square(), {129, 129}), 16, wide);
  CHECK(sum.pass_fraction >= 0.95);
  CHECK(sum.max_gap <= 0.05);

  const auto flat = check_density_equals_jacobian(
      make_constant_map({0.25}, unit_square(), {33, 33}), 8);
  CHECK(flat.pass_fraction == 1.0);
  CHECK(flat.max_gap == 0.0);

  const double hf = 1.0 / 256.0;
  LadderSpec foldspec;
  foldspec.radii = {10.5 * hf, 5.5 * hf, 2.5 * hf};
  const auto folded = check_density_equals_jacobian(make_fold_map(3, {257, 257}), 8, foldspec);
  CHECK(folded.pass_fraction >= 0.95);
  CHECK(folded.skipped > 0);
  REQUIRE(folded.points.size() >= 200);

  CHECK_THROWS_AS(
      check_density_equals_jacobian(make_projection_map(2, 1, unit_square(), {9, 9}), 64, wide),
      EmptyField);
}

TEST_SUITE_END();
