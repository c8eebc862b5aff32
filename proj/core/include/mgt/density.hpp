#pragma once

#include <vector>

#include "mgt/content.hpp"
#include "mgt/geometry.hpp"
#include "mgt/sampled_map.hpp"

namespace mgt {

// Ball uses Euclidean balls B(x,r) with denominator w_n r^n; Cube uses the
// axis cube of side 2r with denominator w_n (2r)^n.
enum class DensityShape { Ball, Cube };

const char* density_shape_name(DensityShape s);

// Radius ladder recipe. Explicit radii override the geometric recipe. Radii
// are clamped to [2h, reach(x)] and snapped down to half-node multiples
// (m + 1/2) h of the grid pitch so no node ever sits on a ball boundary;
// requests at the bottom of the window round up to 2.5h.
struct LadderSpec {
  int count = 8;
  double factor = 0.5;
  double top = 0.0;  // <= 0 means a quarter of the reach at the point
  std::vector<double> radii;
  bool snap = true;  // off trusts the caller to avoid node-boundary ties
};

// Ladder of image-content ratios at one point. theta_upper_hat /
// theta_lower_hat are the max / min ratio over the ladder, the finite-data
// surrogates for the upper and lower n-densities.
struct DensityProfile {
  Vec x;
  std::vector<double> radii;   // strictly decreasing
  std::vector<double> ratios;  // content of the image patch over the ball volume
  double theta_upper_hat = 0.0;
  double theta_lower_hat = 0.0;
  DensityShape shape = DensityShape::Ball;
};

struct DensityOptions {
  ContentDispatch dispatch = ContentDispatch::Auto;
  int oracle_cap = 12;
  double rho = -1.0;   // < 0 derives L-hat * h / 2 from the map
  double cell = -1.0;  // < 0 derives 2 * rho
};

// Clamp, snap and deduplicate a ladder for a point with the given reach.
// Throws RadiusTooSmall when an explicit radius lies below 2h or when the
// window [2.5h, reach] is empty.
std::vector<double> resolve_ladder(const LadderSpec& spec, double h, double reach);

DensityProfile density_profile(const SampledMap& map, const Vec& x, int n,
                               const LadderSpec& ladder = {},
                               DensityShape shape = DensityShape::Ball,
                               const DensityOptions& opts = {});

// Profiles at every stride-th node (all multi-index components divisible by
// the stride) with reach > 2h. Nodes too close to the boundary to host the
// minimum radius are skipped. Parallel over points; output order is by node
// index regardless of schedule.
std::vector<DensityProfile> density_field(const SampledMap& map, int grid_stride, int n,
                                          const LadderSpec& ladder = {},
                                          DensityShape shape = DensityShape::Ball,
                                          const DensityOptions& opts = {});

// Fraction of field points with theta_upper_hat above the threshold.
double positive_density_mass(const std::vector<DensityProfile>& field, double threshold);

}  // namespace mgt
