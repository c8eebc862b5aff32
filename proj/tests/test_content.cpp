#include <cmath>
#include <random>

#include "doctest.h"
#include "mgt/content.hpp"
#include "mgt/errors.hpp"
#include "mgt/gallery.hpp"

using namespace mgt;

namespace {

// Independent reference: enumerate every assignment vector directly (point i
// into cluster assign[i] < k) and keep canonical ones, computing the cover
// value from scratch. Exponentially slower than the shipped oracle but with
// no shared code.
double brute_cover_value(const MetricSpace& space, const std::vector<Vec>& pts, double rho,
                         int n) {
  const int k = static_cast<int>(pts.size());
  std::vector<int> assign(k, 0);
  double best = std::numeric_limits<double>::infinity();
  const double coeff = unit_ball_volume(n) / std::pow(2.0, n);
  while (true) {
    // canonical restricted-growth check so each partition appears once
    int mx = -1;
    bool canonical = true;
    for (int i = 0; i < k; ++i) {
      if (assign[i] > mx + 1) {
        canonical = false;
        break;
      }
      mx = std::max(mx, assign[i]);
    }
    if (canonical) {
      double total = 0.0;
      for (int c = 0; c <= mx; ++c) {
        double diam = 0.0;
        bool seen = false;
        for (int a = 0; a < k; ++a) {
          if (assign[a] != c) continue;
          seen = true;
          for (int b = a + 1; b < k; ++b) {
            if (assign[b] == c) diam = std::max(diam, space.distance(pts[a], pts[b]));
          }
        }
        if (seen) total += coeff * std::pow(diam + 2.0 * rho, n);
      }
      best = std::min(best, total);
    }
    int i = k - 1;
    while (i >= 0 && assign[i] == k - 1) assign[i--] = 0;
    if (i < 0) break;
    ++assign[i];
  }
  return best;
}

std::vector<Vec> random_points(int k, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> pts;
  for (int i = 0; i < k; ++i) {
    Vec p(dim);
    for (auto& c : p) c = u(rng);
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

TEST_SUITE_BEGIN("content");

TEST_CASE("hand-checked cluster cover values") {
  auto e1 = MetricSpace::euclidean(1);

  // single point: one rho-ball of measure w_1 * rho
  auto single = content_oracle_exact(e1, {Vec{0.3}}, 0.5, 1);
  CHECK(single.upper == doctest::Approx(1.0));
  CHECK(single.clusters.size() == 1);

  // far apart: singletons win
  auto far = content_oracle_exact(e1, {Vec{0.0}, Vec{10.0}}, 0.5, 1);
  CHECK(far.upper == doctest::Approx(2.0));
  CHECK(far.clusters.size() == 2);

  // close: one cluster wins
  auto close = content_oracle_exact(e1, {Vec{0.0}, Vec{0.1}}, 0.5, 1);
  CHECK(close.upper == doctest::Approx(1.1));
  CHECK(close.clusters.size() == 1);
  CHECK(close.cluster_diam[0] == doctest::Approx(0.1));

  // with rho = 0 every point is a null singleton, whatever the spacing
  std::vector<Vec> line;
  for (int i = 0; i < 10; ++i) line.push_back(Vec{0.01 * i});
  CHECK(content_oracle_exact(e1, line, 0.0, 1).upper == 0.0);
  CHECK(content_greedy(e1, line, 0.0, 1).upper == 0.0);
}

TEST_CASE("oracle matches the brute-force reference") {
  auto e2 = MetricSpace::euclidean(2);
  for (unsigned seed = 1; seed <= 12; ++seed) {
    const int k = 2 + static_cast<int>(seed % 6);
    auto pts = random_points(k, 2, seed);
    for (double rho : {0.02, 0.2}) {
      for (int n : {1, 2}) {
        const double want = brute_cover_value(e2, pts, rho, n);
        const auto got = content_oracle_exact(e2, pts, rho, n);
        CHECK(got.upper == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("greedy dominates the oracle and matches it on easy instances") {
  auto e2 = MetricSpace::euclidean(2);
  int equal = 0;
  for (unsigned seed = 100; seed < 160; ++seed) {
    auto pts = random_points(3 + static_cast<int>(seed % 8), 2, seed);
    const auto oracle = content_oracle_exact(e2, pts, 0.05, 1);
    const auto greedy = content_greedy(e2, pts, 0.05, 1);
    CHECK(greedy.upper >= oracle.upper - 1e-12);
    if (greedy.upper <= oracle.upper + 1e-12) ++equal;
  }
  CHECK(equal >= 30);  // informational floor; greedy is usually exact here

  // two well-separated pairs: greedy finds the optimal 2-cluster split
  std::vector<Vec> pairs{Vec{0.0, 0.0}, Vec{0.01, 0.0}, Vec{5.0, 0.0}, Vec{5.02, 0.0}};
  const auto g = content_greedy(e2, pairs, 0.1, 1);
  const auto o = content_oracle_exact(e2, pairs, 0.1, 1);
  CHECK(g.upper == doctest::Approx(o.upper));
  CHECK(g.clusters == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
}

TEST_CASE("scaling law: distances and rho scaled by t multiply value by t^n") {
  auto e2 = MetricSpace::euclidean(2);
  for (unsigned seed = 7; seed < 27; ++seed) {
    auto pts = random_points(7, 2, seed);
    for (double t : {0.25, 3.0}) {
      std::vector<Vec> scaled;
      for (const auto& p : pts) scaled.push_back(Vec{t * p[0], t * p[1]});
      for (int n : {1, 2}) {
        const double base = content_oracle_exact(e2, pts, 0.1, n).upper;
        const double big = content_oracle_exact(e2, scaled, 0.1 * t, n).upper;
        CHECK(big == doctest::Approx(base * std::pow(t, n)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adding a point never decreases the value") {
  auto e1 = MetricSpace::euclidean(1);
  for (unsigned seed = 40; seed < 48; ++seed) {
    auto pts = random_points(7, 1, seed);
    auto fewer = pts;
    fewer.pop_back();
    for (double rho : {0.0, 0.3}) {
      CHECK(content_oracle_exact(e1, pts, rho, 1).upper >=
            content_oracle_exact(e1, fewer, rho, 1).upper - 1e-12);
      CHECK(content_greedy(e1, pts, rho, 1).upper >=
            content_greedy(e1, fewer, rho, 1).upper - 1e-12);
    }
  }
}

TEST_CASE("single-cluster upper bound at n = 1") {
  auto e1 = MetricSpace::euclidean(1);
  auto pts = random_points(9, 1, 5);
  double diam = 0.0;
  for (const auto& p : pts)
    for (const auto& q : pts) diam = std::max(diam, std::fabs(p[0] - q[0]));
  CHECK(content_oracle_exact(e1, pts, 0.0, 1).upper <= diam + 1e-12);
}

TEST_CASE("input validation") {
  auto e1 = MetricSpace::euclidean(1);
  CHECK_THROWS_AS(content_greedy(e1, {}, 0.1, 1), EmptyInput);
  CHECK_THROWS_AS(content_oracle_exact(e1, random_points(13, 1, 1), 0.1, 1), TooManyPoints);
  CHECK_THROWS_AS(content_oracle_exact(e1, {Vec{0.0}}, -0.1, 1), InvalidSpec);
  CHECK_THROWS_AS(content_oracle_exact(e1, {Vec{0.0}}, 0.1, 0), InvalidDims);
}

TEST_CASE("pixel content of sampled segments and squares") {
  // dyadic pitch: 0, 1/128, ..., 1 occupy exactly 129 cells
  std::vector<Vec> seg;
  for (int i = 0; i <= 128; ++i) seg.push_back(Vec{i / 128.0});
  auto est = content_pixel_euclidean(seg, 1, 1.0 / 128.0);
  CHECK(est.upper == 129.0 / 128.0);
  CHECK(est.lower == est.upper);

  // duplicates and unordered input do not change the count
  seg.push_back(Vec{0.5});
  seg.push_back(Vec{0.004});
  CHECK(content_pixel_euclidean(seg, 1, 1.0 / 128.0).upper == 129.0 / 128.0);

  // decimal pitches round; the snap in the cell index keeps i/100 on the
  // cell it would occupy in real arithmetic (101 distinct cells here)
  std::vector<Vec> dec;
  for (int i = 0; i <= 100; ++i) dec.push_back(Vec{i / 100.0});
  const double approx = content_pixel_euclidean(dec, 1, 0.01).upper;
  CHECK(approx == doctest::Approx(1.01).epsilon(1e-12));

  // negative coordinates occupy their own cells
  CHECK(content_pixel_euclidean({Vec{-0.005}, Vec{0.005}}, 1, 0.01).upper ==
        doctest::Approx(0.02));

  CHECK(content_pixel_euclidean({}, 2, 0.1).upper == 0.0);
  CHECK_THROWS_AS(content_pixel_euclidean({Vec{0.0, 0.0}}, 1, 0.01), DimensionMismatch);
  CHECK_THROWS_AS(content_pixel_euclidean({Vec{0.0}}, 1, 0.0), InvalidSpec);

  // segment-length bracket for a dense sample of [0.2, 0.7]
  std::vector<Vec> dense;
  for (int i = 0; i <= 1000; ++i) dense.push_back(Vec{0.2 + 0.5 * i / 1000.0});
  const double v = content_pixel_euclidean(dense, 1, 0.01).upper;
  CHECK(v >= 0.5 - 0.02);
  CHECK(v <= 0.5 + 0.02);
}

TEST_CASE("dispatch picks pixel for euclidean targets and clusters otherwise") {
  auto proj = make_projection_map(2, 1, Box{{0.0, 0.0}, {1.0, 1.0}}, {9, 9});
  auto pts = image_points(proj);
  ContentOptions opts;
  opts.rho = default_inflation(proj);
  const auto est = content_estimate(proj.target(), pts, 1, opts);
  CHECK(est.method == ContentMethod::Pixel);
  // 9 nodes at dyadic pitch 1/8, cell = 2 rho = 1/8: 9 cells
  CHECK(est.upper == doctest::Approx(9.0 / 8.0));

  auto sup = MetricSpace::sup_norm(1);
  const auto est2 = content_estimate(sup, {Vec{0.0}, Vec{0.5}, Vec{0.51}}, 1, opts);
  CHECK(est2.method == ContentMethod::Oracle);

  ContentOptions forced = opts;
  forced.dispatch = ContentDispatch::Cluster;
  const auto est3 = content_estimate(proj.target(), {Vec{0.0}, Vec{0.5}}, 1, forced);
  CHECK(est3.method == ContentMethod::Oracle);

  ContentOptions big = opts;
  big.oracle_cap = 2;
  const auto est4 = content_estimate(sup, {Vec{0.0}, Vec{0.5}, Vec{0.51}}, 1, big);
  CHECK(est4.method == ContentMethod::Greedy);
}

TEST_CASE("image point extraction") {
  auto proj = make_projection_map(2, 1, Box{{0.0, 0.0}, {1.0, 1.0}}, {3, 3});
  auto all = image_points(proj);
  CHECK(all.size() == 9);
  auto some = image_points(proj, {0, 4, 8});
  REQUIRE(some.size() == 3);
  CHECK(some[1][0] == doctest::Approx(0.5));
  CHECK(default_inflation(proj) == doctest::Approx(0.25));
}

TEST_SUITE_END();
