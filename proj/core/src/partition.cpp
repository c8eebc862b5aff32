#include "mgt/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mgt/errors.hpp"
#include "mgt/geometry.hpp"
#include "mgt/jacobian.hpp"
#include "mgt/metric_space.hpp"
#include "mgt/parallel.hpp"

namespace mgt {

namespace {

double pow_int(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

struct CubeNode {
  std::string address;
  int depth = 0;
  std::vector<double> lo, hi;  // geometry
  std::vector<int> ilo, ihi;   // grid node index window, inclusive
  std::vector<int> children;   // empty at the deepest level
  double content = 0.0;
  double term = 0.0;
  double cost = 0.0;
  bool take_direct = true;
};

void validate_nm(const SampledMap& map, int n, int m, int depth_max) {
  if (n < 1 || m < 0) throw InvalidDims("nm-content: need n >= 1 and m >= 0");
  if (n + m != map.domain_dim())
    throw InvalidDims("nm-content: n + m must equal the domain dimension");
  if (depth_max < 0) throw InvalidSpec("nm-content: depth must be >= 0");
  if (!map.grid().box().is_cube())
    throw NonCubeDomain("nm-content: domain box must be a cube");
  const long long need = 1LL << depth_max;
  for (int a = 0; a < map.domain_dim(); ++a) {
    if (map.grid().nodes(a) - 1 < need)
      throw DepthTooDeep("nm-content: leaf cubes at depth " + std::to_string(depth_max) +
                         " fall below the grid pitch");
  }
}

// Pre-order dyadic tree over grid index windows. A node on a shared face goes
// to the child whose half covers the smaller coordinates, which is also the
// lexicographically smallest address.
std::vector<CubeNode> build_tree(const GridSpec& grid, int depth_max) {
  const int k = grid.dim();
  std::vector<CubeNode> nodes;
  CubeNode root;
  root.address = "0";
  root.lo = grid.box().lo;
  root.hi = grid.box().hi;
  root.ilo.assign(k, 0);
  root.ihi.resize(k);
  for (int a = 0; a < k; ++a) root.ihi[a] = grid.nodes(a) - 1;
  nodes.push_back(std::move(root));

  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (nodes[id].depth == depth_max) continue;
    std::vector<int> i_mid(k);
    std::vector<double> mid(k);
    for (int a = 0; a < k; ++a) {
      mid[a] = 0.5 * (nodes[id].lo[a] + nodes[id].hi[a]);
      i_mid[a] = static_cast<int>(
          std::floor((mid[a] - grid.box().lo[a]) / grid.spacing(a) + 1e-9));
    }
    for (int c = 0; c < (1 << k); ++c) {
      CubeNode child;
      child.address = nodes[id].address + "." + std::to_string(c);
      child.depth = nodes[id].depth + 1;
      child.lo.resize(k);
      child.hi.resize(k);
      child.ilo.resize(k);
      child.ihi.resize(k);
      for (int a = 0; a < k; ++a) {
        const bool upper = (c >> a) & 1;
        child.lo[a] = upper ? mid[a] : nodes[id].lo[a];
        child.hi[a] = upper ? nodes[id].hi[a] : mid[a];
        child.ilo[a] = upper ? i_mid[a] + 1 : nodes[id].ilo[a];
        child.ihi[a] = upper ? nodes[id].ihi[a] : i_mid[a];
      }
      nodes[id].children.push_back(static_cast<int>(nodes.size()));
      nodes.push_back(std::move(child));
    }
  }
  return nodes;
}

std::vector<std::size_t> window_flats(const GridSpec& grid, const CubeNode& cube) {
  const int k = grid.dim();
  std::size_t count = 1;
  for (int a = 0; a < k; ++a) {
    if (cube.ihi[a] < cube.ilo[a]) return {};  // cannot happen within the depth guard
    count *= static_cast<std::size_t>(cube.ihi[a] - cube.ilo[a] + 1);
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  std::vector<int> mi(cube.ilo);
  for (;;) {
    out.push_back(grid.flat_index(mi));
    int a = k - 1;
    while (a >= 0 && ++mi[a] > cube.ihi[a]) {
      mi[a] = cube.ilo[a];
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

// Certified upper term for one cube: content of the sampled image, inflated
// by rho = L h / 2 so the estimate covers the true image, times side^m.
void fill_terms(const SampledMap& map, std::vector<CubeNode>& nodes, int n, int m) {
  const double rho = default_inflation(map);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const auto pts = image_points(map, window_flats(map.grid(), nodes[i]));
    double content = 0.0;
    if (rho > 0.0 && !pts.empty()) {
      ContentOptions copts;
      copts.rho = rho;
      copts.cell = 2.0 * rho;
      content = content_estimate(map.target(), pts, n, copts).upper;
    }
    // rho == 0 means a constant sampling: a bare finite set has zero content
    // at order >= 1, and the pixel path rejects a zero pitch.
    const double side = nodes[i].hi[0] - nodes[i].lo[0];
    nodes[i].content = content;
    nodes[i].term = content * pow_int(side, m);
  });
}

// Children sit after their parent, so one reverse sweep folds the tree.
// Ties keep the coarser cube.
void run_dp(std::vector<CubeNode>& nodes) {
  for (std::size_t r = nodes.size(); r-- > 0;) {
    CubeNode& c = nodes[r];
    if (c.children.empty()) {
      c.cost = c.term;
      c.take_direct = true;
      continue;
    }
    double child_sum = 0.0;
    for (int ch : c.children) child_sum += nodes[ch].cost;
    c.take_direct = c.term <= child_sum;
    c.cost = c.take_direct ? c.term : child_sum;
  }
}

PartitionResult collect_cut(const std::vector<CubeNode>& nodes,
                            const std::vector<int>& cut_ids, int n, int m,
                            int depth_max) {
  PartitionResult res;
  res.n = n;
  res.m = m;
  res.depth_max = depth_max;
  for (int id : cut_ids) {
    const CubeNode& c = nodes[id];
    PartitionCube row;
    row.address = c.address;
    row.side = c.hi[0] - c.lo[0];
    row.term = c.term;
    row.content_upper = c.content;
    res.value += row.term;
    res.cut_set.push_back(row.address);
    res.per_cube.push_back(std::move(row));
  }
  return res;
}

}  // namespace

PartitionResult nm_content_dyadic(const SampledMap& map, int n, int m, int depth_max) {
  validate_nm(map, n, m, depth_max);
  auto nodes = build_tree(map.grid(), depth_max);
  fill_terms(map, nodes, n, m);
  run_dp(nodes);

  std::vector<int> cut_ids;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (nodes[id].take_direct) {
      cut_ids.push_back(id);
      continue;
    }
    // push in reverse so children emit in address order
    for (auto it = nodes[id].children.rbegin(); it != nodes[id].children.rend(); ++it)
      stack.push_back(*it);
  }
  return collect_cut(nodes, cut_ids, n, m, depth_max);
}

PartitionResult nm_content_enumerate(const SampledMap& map, int n, int m, int depth_max) {
  validate_nm(map, n, m, depth_max);
  // Cut sets satisfy T(d+1) = T(d)^(2^k) + 1; refuse sizes past a few hundred
  // thousand, which covers every tree the dyadic DP is cross-checked against.
  double count = 1.0;
  for (int d = 0; d < depth_max; ++d)
    count = std::pow(count, static_cast<double>(1 << map.domain_dim())) + 1.0;
  if (!(count <= 1.0e6))
    throw InvalidSpec("nm-content: exhaustive enumeration is limited to small trees");

  auto nodes = build_tree(map.grid(), depth_max);
  fill_terms(map, nodes, n, m);

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_ids;
  std::vector<int> buf;
  double sum = 0.0;

  // Streams every cut set through a shared buffer: take the cube itself, or
  // the cartesian product of the children's cut sets.
  std::function<void(int, const std::function<void()>&)> each_cut =
      [&](int id, const std::function<void()>& done) {
        buf.push_back(id);
        sum += nodes[id].term;
        done();
        sum -= nodes[id].term;
        buf.pop_back();
        if (nodes[id].children.empty()) return;
        std::function<void(std::size_t)> product = [&](std::size_t ci) {
          if (ci == nodes[id].children.size()) {
            done();
            return;
          }
          each_cut(nodes[id].children[ci], [&] { product(ci + 1); });
        };
        product(0);
      };
  each_cut(0, [&] {
    if (sum < best) {
      best = sum;
      best_ids = buf;
    }
  });
  return collect_cut(nodes, best_ids, n, m, depth_max);
}

Prop51Report check_prop51(const SampledMap& map, int n, int m, int depth_max,
                          const LadderSpec& ladder, int grid_stride,
                          const DensityOptions& opts) {
  Prop51Report rep;
  rep.partition = nm_content_dyadic(map, n, m, depth_max);
  rep.lhs = rep.partition.value;

  const auto field = density_field(map, grid_stride, n, ladder, DensityShape::Ball, opts);
  double mean_lower = 0.0;
  for (const auto& p : field) mean_lower += p.theta_lower_hat;
  mean_lower /= static_cast<double>(field.size());

  const double coeff = unit_ball_volume(n) / pow_int(2.0, n) *
                       std::sqrt(pow_int(static_cast<double>(n + m), n));
  const double volume = map.grid().box().volume();
  rep.rhs_density = coeff * mean_lower * volume;
  rep.holds = rep.lhs <= rep.rhs_density * 1.1;
  rep.slack = rep.rhs_density - rep.lhs;

  if (map.target().kind() == SpaceKind::Euclidean && map.target_dim() == n) {
    rep.jacobian_variant = true;
    double mean_jac = 0.0;
    std::size_t used = 0;
    for (const auto& p : field) {
      try {
        mean_jac += jacobian_n(approx_derivative(map, p.x), n);
        ++used;
      } catch (const OutOfDomain&) {
        // differencing needs more margin than the density ladder; skip the rim
      }
    }
    if (used > 0) {
      mean_jac /= static_cast<double>(used);
      rep.rhs_jacobian = coeff * mean_jac * volume;
      rep.holds_jacobian = rep.lhs <= rep.rhs_jacobian * 1.1;
    } else {
      rep.jacobian_variant = false;
    }
  }
  return rep;
}

}  // namespace mgt
