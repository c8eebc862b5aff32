#include "mgt/content.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

constexpr std::size_t kGreedyCap = 1024;
constexpr std::size_t kOracleCap = 12;

double pow_int(double base, int n) {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= base;
  return v;
}

// Pairwise distance matrix, row-major.
std::vector<double> distance_matrix(const MetricSpace& space, const std::vector<Vec>& points) {
  const std::size_t k = points.size();
  std::vector<double> d(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      d[i * k + j] = d[j * k + i] = space.distance(points[i], points[j]);
    }
  }
  return d;
}

struct ClusterValue {
  double coeff;  // w_n / 2^n
  double two_rho;
  int n;
  double operator()(double diam) const { return coeff * pow_int(diam + two_rho, n); }
};

ContentEstimate finish_cluster_estimate(ContentMethod method, int n, double rho,
                                        const std::vector<double>& dist, std::size_t count,
                                        std::vector<std::vector<int>> clusters,
                                        const ClusterValue& value) {
  ContentEstimate est;
  est.n = n;
  est.method = method;
  est.rho = rho;
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end());
  double total = 0.0;
  for (auto& c : clusters) {
    double diam = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        diam = std::max(diam, dist[static_cast<std::size_t>(c[a]) * count + c[b]]);
      }
    }
    est.cluster_diam.push_back(diam);
    total += value(diam);
  }
  est.clusters = std::move(clusters);
  est.lower = 0.0;
  est.upper = total;
  return est;
}

void validate_cluster_inputs(const std::vector<Vec>& points, double rho, int n) {
  if (points.empty()) throw EmptyInput("content: no points");
  if (rho < 0.0) throw InvalidSpec("content: negative inflation radius");
  if (n < 1) throw InvalidDims("content: order must be >= 1");
}

struct OracleState {
  const std::vector<double>* dist;
  std::size_t k;
  ClusterValue value;
  std::vector<int> assign;
  std::vector<double> diam;
  int used = 0;
  double partial = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;

  void recurse(std::size_t i) {
    // partial only grows as points join, so it prunes whole subtrees
    if (partial >= best) return;
    if (i == k) {
      best = partial;
      best_assign = assign;
      return;
    }
    for (int j = 0; j < used; ++j) {
      double cross = 0.0;
      for (std::size_t p = 0; p < i; ++p) {
        if (assign[p] == j) cross = std::max(cross, (*dist)[p * k + i]);
      }
      const double nd = std::max(diam[j], cross);
      const double old = diam[j];
      const double delta = value(nd) - value(old);
      assign[i] = j;
      diam[j] = nd;
      partial += delta;
      recurse(i + 1);
      partial -= delta;
      diam[j] = old;
    }
    assign[i] = used;
    diam[used] = 0.0;
    partial += value(0.0);
    ++used;
    recurse(i + 1);
    --used;
    partial -= value(0.0);
  }
};

}  // namespace

std::string content_method_name(ContentMethod m) {
  switch (m) {
    case ContentMethod::Oracle: return "oracle";
    case ContentMethod::Greedy: return "greedy";
    case ContentMethod::Pixel: return "pixel";
  }
  return "?";
}

ContentEstimate content_oracle_exact(const MetricSpace& space, const std::vector<Vec>& points,
                                     double rho, int n) {
  validate_cluster_inputs(points, rho, n);
  const std::size_t k = points.size();
  if (k > kOracleCap) throw TooManyPoints("content oracle: more than 12 points");
  const auto dist = distance_matrix(space, points);

  OracleState st;
  st.dist = &dist;
  st.k = k;
  st.value = {unit_ball_volume(n) / pow_int(2.0, n), 2.0 * rho, n};
  st.assign.assign(k, 0);
  st.diam.assign(k, 0.0);
  st.recurse(0);

  std::vector<std::vector<int>> clusters;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(st.best_assign[i]);
    if (j >= clusters.size()) clusters.resize(j + 1);
    clusters[j].push_back(static_cast<int>(i));
  }
  return finish_cluster_estimate(ContentMethod::Oracle, n, rho, dist, k, std::move(clusters),
                                 st.value);
}

ContentEstimate content_greedy(const MetricSpace& space, const std::vector<Vec>& points,
                               double rho, int n) {
  validate_cluster_inputs(points, rho, n);
  const std::size_t k = points.size();
  if (k > kGreedyCap) throw TooManyPoints("content greedy: more than 1024 points");
  const auto dist = distance_matrix(space, points);
  const ClusterValue value{unit_ball_volume(n) / pow_int(2.0, n), 2.0 * rho, n};

  std::vector<std::vector<int>> members(k);
  std::vector<double> diam(k, 0.0);
  // cross[a][b]: max pairwise distance between clusters a and b
  std::vector<std::vector<double>> cross(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    members[i] = {static_cast<int>(i)};
    for (std::size_t j = 0; j < k; ++j) cross[i][j] = dist[i * k + j];
  }

  while (members.size() > 1) {
    double best = 0.0;
    std::size_t ba = 0, bb = 0;
    bool found = false;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double merged = std::max({diam[a], diam[b], cross[a][b]});
        const double delta = value(merged) - value(diam[a]) - value(diam[b]);
        if (delta < best) {  // strict: ties keep the earliest (a, b)
          best = delta;
          ba = a;
          bb = b;
          found = true;
        }
      }
    }
    if (!found) break;
    diam[ba] = std::max({diam[ba], diam[bb], cross[ba][bb]});
    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    for (std::size_t c = 0; c < members.size(); ++c) {
      cross[ba][c] = cross[c][ba] = std::max(cross[ba][c], cross[bb][c]);
    }
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bb));
    diam.erase(diam.begin() + static_cast<std::ptrdiff_t>(bb));
    cross.erase(cross.begin() + static_cast<std::ptrdiff_t>(bb));
    for (auto& row : cross) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bb));
  }

  return finish_cluster_estimate(ContentMethod::Greedy, n, rho, dist, k, std::move(members),
                                 value);
}

ContentEstimate content_pixel_euclidean(const std::vector<Vec>& points, int n, double cell) {
  if (n < 1) throw InvalidDims("pixel content: order must be >= 1");
  if (!(cell > 0.0)) throw InvalidSpec("pixel content: cell pitch must be positive");
  std::vector<std::vector<long long>> cells;
  cells.reserve(points.size());
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != n) {
      throw DimensionMismatch("pixel content: point length != order");
    }
    std::vector<long long> key(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) {
      // nudge quotients sitting a few ulps under an integer back onto it, so
      // decimal pitches index like their real-arithmetic counterparts
      key[a] = static_cast<long long>(std::floor(p[a] / cell + 1e-9));
    }
    cells.push_back(std::move(key));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  ContentEstimate est;
  est.n = n;
  est.method = ContentMethod::Pixel;
  est.cell = cell;
  est.upper = est.lower = static_cast<double>(cells.size()) * pow_int(cell, n);
  return est;
}

ContentEstimate content_estimate(const MetricSpace& target, const std::vector<Vec>& points,
                                 int n, const ContentOptions& opts) {
  if (n < 1) throw InvalidDims("content: order must be >= 1");
  bool pixel = false;
  switch (opts.dispatch) {
    case ContentDispatch::Auto:
      pixel = target.kind() == SpaceKind::Euclidean && target.point_dim() == n;
      break;
    case ContentDispatch::Pixel:
      if (!target.componentwise()) throw NonComponentTarget("pixel content: coordinate target required");
      if (target.point_dim() != n) throw DimensionMismatch("pixel content: target dim != order");
      pixel = true;
      break;
    case ContentDispatch::Cluster:
      pixel = false;
      break;
  }
  if (pixel) {
    const double cell = opts.cell > 0.0 ? opts.cell : 2.0 * opts.rho;
    if (!(cell > 0.0)) throw InvalidSpec("pixel content: need a cell pitch or inflation radius");
    return content_pixel_euclidean(points, n, cell);
  }
  const std::size_t cap = opts.oracle_cap > 0 ? static_cast<std::size_t>(opts.oracle_cap) : 0;
  if (points.size() <= cap && points.size() <= kOracleCap) {
    return content_oracle_exact(target, points, opts.rho, n);
  }
  return content_greedy(target, points, opts.rho, n);
}

std::vector<Vec> image_points(const SampledMap& map) {
  std::vector<Vec> pts;
  pts.reserve(map.grid().count());
  for (std::size_t f = 0; f < map.grid().count(); ++f) {
    const auto img = map.node_image(f);
    pts.emplace_back(img.begin(), img.end());
  }
  return pts;
}

std::vector<Vec> image_points(const SampledMap& map, const std::vector<std::size_t>& nodes) {
  std::vector<Vec> pts;
  pts.reserve(nodes.size());
  for (std::size_t f : nodes) {
    const auto img = map.node_image(f);
    pts.emplace_back(img.begin(), img.end());
  }
  return pts;
}

double default_inflation(const SampledMap& map) {
  return map.effective_lipschitz() * map.grid().max_spacing() / 2.0;
}

}  // namespace mgt
