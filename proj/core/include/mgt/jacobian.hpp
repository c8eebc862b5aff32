#pragma once

#include <vector>

#include "mgt/density.hpp"
#include "mgt/sampled_map.hpp"

namespace mgt {

// Finite-difference derivative at a point, with its singular values and
// numerical rank (count of singular values >= tol_rank * sigma_max).
struct DerivativeSample {
  Vec x;
  std::vector<double> matrix;  // rows x cols, row-major
  int rows = 0;                // target components
  int cols = 0;                // domain axes
  double h_fd = 0.0;           // 0 marks exact affine differencing
  std::vector<double> singular_values;  // nonincreasing
  int rank_estimate = 0;
  double tol_rank = 1e-6;

  double entry(int i, int a) const {
    return matrix[static_cast<std::size_t>(i) * cols + a];
  }
};

// Central differences per target component and domain axis. Affine rules
// difference exactly whatever the step. h_fd <= 0 picks the default: 1e-5
// for closed-form rules, max(1e-5, 2h) for grid presentations.
DerivativeSample approx_derivative(const SampledMap& map, const Vec& x, double h_fd = 0.0);

// sqrt(det D D^T), the product of the singular values; 0 when the numerical
// rank falls below n. The matrix must have exactly n rows.
double jacobian_n(const DerivativeSample& d, int n);

struct DensityJacobianPoint {
  Vec x;
  double theta_lower = 0.0;
  double theta_upper = 0.0;
  double jac = 0.0;
  // distance from jac to [theta_lower, theta_upper] over max(jac, 0.1)
  double gap = 0.0;
};

struct DensityJacobianReport {
  std::vector<DensityJacobianPoint> points;
  double max_gap = 0.0;
  double pass_fraction = 0.0;
  double tolerance = 0.05;
  std::size_t skipped = 0;  // crease band or ladder does not fit untruncated
};

// Density-vs-Jacobian agreement over stride-th interior nodes, for maps into
// euclidean(n). Points within 2h of a crease, or too close to the boundary
// to host the requested ladder at full size, are skipped, not failed: the
// local model the comparison relies on stops there.
DensityJacobianReport check_density_equals_jacobian(const SampledMap& map, int grid_stride,
                                                    const LadderSpec& ladder = {},
                                                    double tolerance = 0.05,
                                                    const DensityOptions& opts = {});

}  // namespace mgt
