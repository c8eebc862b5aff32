#include "mgt/jacobian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mgt/parallel.hpp"

namespace mgt {

namespace {

void attach_spectrum(DerivativeSample& d) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      m(d.matrix.data(), d.rows, d.cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  d.singular_values.assign(sv.data(), sv.data() + sv.size());
  d.rank_estimate = 0;
  const double top = d.singular_values.empty() ? 0.0 : d.singular_values.front();
  if (top > 0.0) {
    for (double s : d.singular_values) {
      if (s >= d.tol_rank * top) ++d.rank_estimate;
    }
  }
}

}  // namespace

DerivativeSample approx_derivative(const SampledMap& map, const Vec& x, double h_fd) {
  if (static_cast<int>(x.size()) != map.domain_dim()) {
    throw DimensionMismatch("approx_derivative: point dimension does not match the domain");
  }
  if (!map.target().componentwise()) {
    throw NonComponentTarget("approx_derivative: target must be coordinate-wise evaluable");
  }
  if (!map.grid().box().contains(x)) {
    throw OutOfDomain("approx_derivative: point outside the domain box");
  }

  const int k = map.domain_dim();
  const int rows = map.target_dim();
  DerivativeSample d;
  d.x = x;
  d.rows = rows;
  d.cols = k;
  d.matrix.assign(static_cast<std::size_t>(rows) * k, 0.0);

  if (map.has_rule() && map.rule().affine()) {
    // rules are closed forms, so unit probes stay valid outside the box and
    // the difference is exact for affine maps
    Vec p(x), q(x), fp(rows), fq(rows);
    for (int a = 0; a < k; ++a) {
      p[a] = x[a] + 1.0;
      q[a] = x[a] - 1.0;
      map.rule().eval(p, fp);
      map.rule().eval(q, fq);
      for (int i = 0; i < rows; ++i) {
        d.matrix[static_cast<std::size_t>(i) * k + a] = 0.5 * (fp[i] - fq[i]);
      }
      p[a] = x[a];
      q[a] = x[a];
    }
  } else {
    double step = h_fd;
    if (step <= 0.0) {
      step = map.closed_form() ? 1e-5 : std::max(1e-5, 2.0 * map.grid().max_spacing());
    }
    if (map.grid().box().reach(x) < step * (1.0 - 1e-12)) {
      throw OutOfDomain("approx_derivative: differencing step crosses the boundary");
    }
    d.h_fd = step;
    Vec p(x), q(x);
    for (int a = 0; a < k; ++a) {
      p[a] = x[a] + step;
      q[a] = x[a] - step;
      const Vec fp = map.evaluate(p);
      const Vec fq = map.evaluate(q);
      for (int i = 0; i < rows; ++i) {
        d.matrix[static_cast<std::size_t>(i) * k + a] = (fp[i] - fq[i]) / (2.0 * step);
      }
      p[a] = x[a];
      q[a] = x[a];
    }
  }

  attach_spectrum(d);
  return d;
}

double jacobian_n(const DerivativeSample& d, int n) {
  if (n < 1) throw InvalidDims("jacobian_n: order must be >= 1");
  if (d.rows != n) {
    throw DimensionMismatch("jacobian_n: matrix row count differs from the requested order");
  }
  if (d.rank_estimate < n) return 0.0;
  double j = 1.0;
  for (int i = 0; i < n; ++i) j *= d.singular_values[i];
  return j;
}

DensityJacobianReport check_density_equals_jacobian(const SampledMap& map, int grid_stride,
                                                    const LadderSpec& ladder, double tolerance,
                                                    const DensityOptions& opts) {
  if (grid_stride < 1) throw InvalidSpec("check_density_equals_jacobian: stride must be >= 1");
  if (map.target().kind() != SpaceKind::Euclidean) {
    throw NonComponentTarget("check_density_equals_jacobian: target must be euclidean(n)");
  }
  const int n = map.target_dim();
  const GridSpec& grid = map.grid();
  const double h = grid.max_spacing();

  double step = map.closed_form() ? 1e-5 : std::max(1e-5, 2.0 * h);
  double margin = step;
  if (!ladder.radii.empty()) {
    margin = std::max(margin, *std::max_element(ladder.radii.begin(), ladder.radii.end()));
  } else if (ladder.top > 0.0) {
    margin = std::max(margin, ladder.top);
  }

  DensityJacobianReport report;
  report.tolerance = tolerance;

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
    if (reach < 2.5 * h * (1.0 - 1e-9)) continue;
    if (reach < margin * (1.0 - 1e-9) || map.crease_distance(x) <= 2.0 * h) {
      ++report.skipped;
      continue;
    }
    keep.push_back(flat);
  }
  if (keep.empty()) {
    throw EmptyField("check_density_equals_jacobian: no comparable points");
  }

  report.points.resize(keep.size());
  parallel_for(keep.size(), [&](std::size_t idx) {
    const Vec x = grid.node(keep[idx]);
    const DensityProfile prof = density_profile(map, x, n, ladder, DensityShape::Ball, opts);
    const double jac = jacobian_n(approx_derivative(map, x), n);
    DensityJacobianPoint& pt = report.points[idx];
    pt.x = x;
    pt.theta_lower = prof.theta_lower_hat;
    pt.theta_upper = prof.theta_upper_hat;
    pt.jac = jac;
    double dist = 0.0;
    if (jac < pt.theta_lower) dist = pt.theta_lower - jac;
    if (jac > pt.theta_upper) dist = jac - pt.theta_upper;
    pt.gap = dist / std::max(jac, 0.1);
  });

  std::size_t ok = 0;
  for (const DensityJacobianPoint& pt : report.points) {
    report.max_gap = std::max(report.max_gap, pt.gap);
    if (pt.gap <= tolerance) ++ok;
  }
  report.pass_fraction = static_cast<double>(ok) / static_cast<double>(report.points.size());
  return report;
}

}  // namespace mgt
