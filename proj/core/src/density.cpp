#include "mgt/density.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/parallel.hpp"

namespace mgt {

namespace {

// Snap r down to (m + 1/2) h inside [2.5h, reach]; negative when the window
// is empty. Requests below the window round up to 2.5h.
double snap_half_node(double r, double h, double reach) {
  long long m = static_cast<long long>(std::floor(r / h - 0.5 + 1e-9));
  if (m < 2) m = 2;
  double snapped = (static_cast<double>(m) + 0.5) * h;
  if (snapped > reach) {
    --m;
    snapped = (static_cast<double>(m) + 0.5) * h;
    if (m < 2 || snapped > reach) return -1.0;
  }
  return snapped;
}

// Flat indices of the grid nodes inside the ball (or axis cube of side 2r)
// around x, in ascending node order.
std::vector<std::size_t> patch_nodes(const GridSpec& grid, const Vec& x, double r,
                                     DensityShape shape) {
  const int k = grid.dim();
  std::vector<int> lo(k), hi(k);
  for (int a = 0; a < k; ++a) {
    const double h = grid.spacing(a);
    const double off = x[a] - grid.box().lo[a];
    const int i0 = static_cast<int>(std::ceil((off - r) / h - 1e-12));
    const int i1 = static_cast<int>(std::floor((off + r) / h + 1e-12));
    lo[a] = std::max(i0, 0);
    hi[a] = std::min(i1, grid.nodes(a) - 1);
    if (lo[a] > hi[a]) return {};
  }
  std::vector<std::size_t> out;
  std::vector<int> mi(lo);
  for (;;) {
    bool keep = true;
    if (shape == DensityShape::Ball) {
      double s2 = 0.0;
      for (int a = 0; a < k; ++a) {
        const double d = grid.coord(a, mi[a]) - x[a];
        s2 += d * d;
      }
      keep = s2 <= r * r;
    }
    if (keep) out.push_back(grid.flat_index(mi));
    int a = k - 1;
    while (a >= 0) {
      if (++mi[a] <= hi[a]) break;
      mi[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

}  // namespace

const char* density_shape_name(DensityShape s) {
  return s == DensityShape::Ball ? "ball" : "cube";
}

std::vector<double> resolve_ladder(const LadderSpec& spec, double h, double reach) {
  if (!(h > 0.0)) throw InvalidSpec("resolve_ladder: pitch must be positive");
  if (!(reach > 0.0)) throw OutOfDomain("resolve_ladder: point has no interior reach");

  std::vector<double> want;
  if (!spec.radii.empty()) {
    for (double r : spec.radii) {
      if (r < 2.0 * h * (1.0 - 1e-9)) {
        throw RadiusTooSmall("resolve_ladder: requested radius below twice the grid pitch");
      }
      want.push_back(std::min(r, reach));
    }
  } else {
    if (spec.count < 1) throw InvalidSpec("resolve_ladder: ladder count must be >= 1");
    if (!(spec.factor > 0.0 && spec.factor < 1.0)) {
      throw InvalidSpec("resolve_ladder: ladder factor must lie in (0, 1)");
    }
    double r = spec.top > 0.0 ? std::min(spec.top, reach) : reach / 4.0;
    for (int t = 0; t < spec.count; ++t, r *= spec.factor) {
      want.push_back(std::clamp(r, 2.0 * h, reach));
    }
  }

  std::vector<double> radii;
  for (double r : want) {
    const double s = spec.snap ? snap_half_node(r, h, reach) : r;
    if (s > 0.0) radii.push_back(s);
  }
  std::sort(radii.begin(), radii.end(), std::greater<double>());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.empty()) {
    throw RadiusTooSmall("resolve_ladder: no admissible radius between 2h and the reach");
  }
  return radii;
}

DensityProfile density_profile(const SampledMap& map, const Vec& x, int n,
                               const LadderSpec& ladder, DensityShape shape,
                               const DensityOptions& opts) {
  if (static_cast<int>(x.size()) != map.domain_dim()) {
    throw DimensionMismatch("density_profile: point dimension does not match the domain");
  }
  if (n < 1) throw InvalidDims("density_profile: order must be >= 1");
  const GridSpec& grid = map.grid();
  if (!grid.box().contains(x)) {
    throw OutOfDomain("density_profile: point outside the domain box");
  }

  DensityProfile prof;
  prof.x = x;
  prof.shape = shape;
  prof.radii = resolve_ladder(ladder, grid.max_spacing(), grid.box().reach(x));

  const double rho = opts.rho >= 0.0 ? opts.rho : default_inflation(map);
  ContentOptions copts;
  copts.rho = rho;
  copts.cell = opts.cell > 0.0 ? opts.cell : 2.0 * rho;
  copts.oracle_cap = opts.oracle_cap;
  copts.dispatch = opts.dispatch;
  // Zero inflation with no pitch: the image patch is a bare finite set, its
  // content at order >= 1 is zero. Happens for constant maps, where L-hat
  // and hence the derived rho vanish.
  const bool degenerate = copts.rho == 0.0 && copts.cell <= 0.0;

  prof.ratios.reserve(prof.radii.size());
  for (double r : prof.radii) {
    double content = 0.0;
    if (!degenerate) {
      const std::vector<std::size_t> nodes = patch_nodes(grid, x, r, shape);
      if (!nodes.empty()) {
        content = content_estimate(map.target(), image_points(map, nodes), n, copts).upper;
      }
    }
    const double d = shape == DensityShape::Cube ? 2.0 * r : r;
    double den = unit_ball_volume(n);
    for (int t = 0; t < n; ++t) den *= d;
    prof.ratios.push_back(content / den);
  }
  prof.theta_upper_hat = *std::max_element(prof.ratios.begin(), prof.ratios.end());
  prof.theta_lower_hat = *std::min_element(prof.ratios.begin(), prof.ratios.end());
  return prof;
}

std::vector<DensityProfile> density_field(const SampledMap& map, int grid_stride, int n,
                                          const LadderSpec& ladder, DensityShape shape,
                                          const DensityOptions& opts) {
  if (grid_stride < 1) throw InvalidSpec("density_field: stride must be >= 1");
  const GridSpec& grid = map.grid();
  const double h = grid.max_spacing();
  // Surface bad explicit radii here; per-point reach issues are skips, user
  // input issues are errors.
  for (double r : ladder.radii) {
    if (r < 2.0 * h * (1.0 - 1e-9)) {
      throw RadiusTooSmall("density_field: requested radius below twice the grid pitch");
    }
  }

  const int k = grid.dim();
  std::vector<std::size_t> keep;
  std::vector<int> mi(k);
  for (std::size_t flat = 0; flat < grid.count(); ++flat) {
    grid.multi_index(flat, mi);
    bool on = true;
    for (int a = 0; a < k && on; ++a) on = mi[a] % grid_stride == 0;
    if (!on) continue;
    const Vec x = grid.node(flat);
    const double reach = grid.box().reach(x);
    if (!(reach > 2.0 * h * (1.0 + 1e-9))) continue;
    if (reach < 2.5 * h * (1.0 - 1e-9)) continue;  // cannot host the minimum radius
    keep.push_back(flat);
  }

  std::vector<DensityProfile> field(keep.size());
  parallel_for(keep.size(), [&](std::size_t idx) {
    field[idx] = density_profile(map, grid.node(keep[idx]), n, ladder, shape, opts);
  });
  return field;
}

double positive_density_mass(const std::vector<DensityProfile>& field, double threshold) {
  if (field.empty()) throw EmptyField("positive_density_mass: empty field");
  if (!(threshold > 0.0)) throw InvalidSpec("positive_density_mass: threshold must be positive");
  std::size_t hits = 0;
  for (const DensityProfile& p : field) {
    if (p.theta_upper_hat > threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(field.size());
}

}  // namespace mgt
