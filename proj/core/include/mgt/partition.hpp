#pragma once

#include <string>
#include <vector>

#include "mgt/content.hpp"
#include "mgt/density.hpp"
#include "mgt/sampled_map.hpp"

namespace mgt {

struct PartitionCube {
  std::string address;  // dyadic path from the root, e.g. "0.3.1"
  double content_upper = 0.0;
  double side = 0.0;
  double term = 0.0;  // content_upper * side^m
};

// Minimizing dyadic cut set and its objective value. The value is an upper
// bound for the cube-partition infimum: only dyadic partitions compete, and
// every per-cube content is itself an upper estimate.
struct PartitionResult {
  int n = 0;
  int m = 0;
  int depth_max = 0;
  double value = 0.0;
  std::vector<std::string> cut_set;     // pairwise disjoint, tiles the domain
  std::vector<PartitionCube> per_cube;  // one row per cut-set cube, same order
};

// Bottom-up DP over the dyadic tree: each cube takes the cheaper of its own
// term and its children's total; ties keep the coarser cube. Grid nodes on a
// shared face belong to the child with the smallest address (the lower half
// along every axis).
PartitionResult nm_content_dyadic(const SampledMap& map, int n, int m, int depth_max);

// Exhaustive minimum over all dyadic cut sets, streamed; the independent
// check of the DP. Supported to depth 3 (83522 cut sets on a quadtree).
PartitionResult nm_content_enumerate(const SampledMap& map, int n, int m, int depth_max);

struct Prop51Report {
  PartitionResult partition;
  double lhs = 0.0;          // partition value
  double rhs_density = 0.0;  // (w_n/2^n)(n+m)^(n/2) * mean theta_lower * |Q|
  double slack = 0.0;        // rhs_density - lhs
  bool holds = false;
  bool jacobian_variant = false;  // evaluated for euclidean(n) targets
  double rhs_jacobian = 0.0;      // same constant, integrand |J^n f|
  bool holds_jacobian = false;
};

// Partition value against the density-integral bound, with the tolerance
// factor 1.1 folded into the verdicts.
Prop51Report check_prop51(const SampledMap& map, int n, int m, int depth_max,
                          const LadderSpec& ladder = {}, int grid_stride = 8,
                          const DensityOptions& opts = {});

}  // namespace mgt
