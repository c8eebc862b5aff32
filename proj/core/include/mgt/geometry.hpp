#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mgt/errors.hpp"

namespace mgt {

using Vec = std::vector<double>;

double sup_dist(std::span<const double> a, std::span<const double> b);
double euclid_dist(std::span<const double> a, std::span<const double> b);

// Volume of the unit ball in R^n; n = 0 gives 1.
double unit_ball_volume(int n);

struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double side(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  bool contains(std::span<const double> x, double pad = 0.0) const;
  // Distance from x to the boundary, min over axes. Negative outside.
  double reach(std::span<const double> x) const;
  bool is_cube(double rel_tol = 1e-12) const;
};

// Regular grid of nodes over a box, endpoints included, row-major with the
// last axis fastest.
class GridSpec {
public:
  GridSpec() = default;
  GridSpec(Box box, std::vector<int> nodes_per_axis);

  const Box& box() const { return box_; }
  int dim() const { return static_cast<int>(nodes_.size()); }
  int nodes(int axis) const { return nodes_[axis]; }
  const std::vector<int>& nodes() const { return nodes_; }
  std::size_t count() const { return count_; }
  double spacing(int axis) const { return spacing_[axis]; }
  double min_spacing() const;
  double max_spacing() const;

  double coord(int axis, int i) const { return box_.lo[axis] + i * spacing_[axis]; }
  void node_into(std::size_t flat, std::span<double> out) const;
  Vec node(std::size_t flat) const;
  void multi_index(std::size_t flat, std::span<int> out) const;
  std::size_t flat_index(std::span<const int> mi) const;

private:
  Box box_;
  std::vector<int> nodes_;
  std::vector<double> spacing_;
  std::size_t count_ = 0;
};

}  // namespace mgt
