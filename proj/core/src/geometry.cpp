#include "mgt/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace mgt {

double sup_dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("sup_dist: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double euclid_dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("euclid_dist: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double unit_ball_volume(int n) {
  if (n < 0) throw InvalidDims("unit_ball_volume: negative dimension");
  // recurrence v_n = v_{n-2} * 2 pi / n keeps low dimensions exact (2, pi, ...)
  double v = n % 2 == 0 ? 1.0 : 2.0;
  for (int k = n % 2 == 0 ? 2 : 3; k <= n; k += 2) {
    v *= 2.0 * std::numbers::pi / k;
  }
  return v;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

bool Box::contains(std::span<const double> x, double pad) const {
  if (static_cast<int>(x.size()) != dim()) throw DimensionMismatch("Box::contains: length mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
  }
  return true;
}

double Box::reach(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw DimensionMismatch("Box::reach: length mismatch");
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) {
    r = std::min(r, std::min(x[i] - lo[i], hi[i] - x[i]));
  }
  return r;
}

bool Box::is_cube(double rel_tol) const {
  if (dim() == 0) return false;
  const double s0 = side(0);
  for (int i = 1; i < dim(); ++i) {
    if (std::fabs(side(i) - s0) > rel_tol * std::max(std::fabs(s0), 1.0)) return false;
  }
  return true;
}

GridSpec::GridSpec(Box box, std::vector<int> nodes_per_axis)
    : box_(std::move(box)), nodes_(std::move(nodes_per_axis)) {
  if (static_cast<int>(nodes_.size()) != box_.dim()) {
    throw DimensionMismatch("GridSpec: axis count does not match box dimension");
  }
  if (nodes_.empty()) throw InvalidDims("GridSpec: zero-dimensional grid");
  count_ = 1;
  spacing_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] < 2) throw DegenerateGrid("GridSpec: fewer than 2 nodes on an axis");
    if (!(box_.hi[i] > box_.lo[i])) throw DegenerateGrid("GridSpec: empty box extent");
    spacing_[i] = (box_.hi[i] - box_.lo[i]) / (nodes_[i] - 1);
    count_ *= static_cast<std::size_t>(nodes_[i]);
  }
}

double GridSpec::min_spacing() const {
  return *std::min_element(spacing_.begin(), spacing_.end());
}

double GridSpec::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.end());
}

void GridSpec::node_into(std::size_t flat, std::span<double> out) const {
  for (int axis = dim() - 1; axis >= 0; --axis) {
    const auto n = static_cast<std::size_t>(nodes_[axis]);
    out[axis] = coord(axis, static_cast<int>(flat % n));
    flat /= n;
  }
}

Vec GridSpec::node(std::size_t flat) const {
  Vec out(dim());
  node_into(flat, out);
  return out;
}

void GridSpec::multi_index(std::size_t flat, std::span<int> out) const {
  for (int axis = dim() - 1; axis >= 0; --axis) {
    const auto n = static_cast<std::size_t>(nodes_[axis]);
    out[axis] = static_cast<int>(flat % n);
    flat /= n;
  }
}

std::size_t GridSpec::flat_index(std::span<const int> mi) const {
  std::size_t f = 0;
  for (int axis = 0; axis < dim(); ++axis) {
    f = f * static_cast<std::size_t>(nodes_[axis]) + static_cast<std::size_t>(mi[axis]);
  }
  return f;
}

}  // namespace mgt
