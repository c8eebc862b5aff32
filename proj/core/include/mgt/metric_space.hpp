#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgt/geometry.hpp"

namespace mgt {

enum class SpaceKind { Euclidean, SupNorm, ExplicitMatrix, Snowflake };

// Target spaces for sampled maps. Points are coordinate vectors; an explicit
// finite space uses length-1 vectors holding the point id.
class MetricSpace {
public:
  static MetricSpace euclidean(int dim);
  static MetricSpace sup_norm(int dim);
  static MetricSpace explicit_matrix(std::vector<double> table, std::vector<std::string> ids);
  static MetricSpace snowflake(MetricSpace base, double alpha);

  SpaceKind kind() const { return kind_; }
  // Length of a point vector in this space (1 for explicit ids).
  int point_dim() const;
  // Coordinate dimension for euclidean / sup_norm (through snowflake wrappers).
  int coordinate_dim() const;
  bool componentwise() const;
  double alpha() const { return alpha_; }
  const MetricSpace& base() const;

  int size() const { return size_; }  // explicit spaces only
  const std::vector<std::string>& ids() const { return ids_; }

  double distance(std::span<const double> p, std::span<const double> q) const;
  double distance_ids(int i, int j) const;

  std::string describe() const;

private:
  MetricSpace() = default;

  SpaceKind kind_ = SpaceKind::Euclidean;
  int dim_ = 0;
  int size_ = 0;
  std::vector<double> table_;       // size_ x size_, row-major
  std::vector<std::string> ids_;
  std::shared_ptr<const MetricSpace> base_;
  double alpha_ = 1.0;
};

// Square distance table from a CSV whose header row carries the point ids.
// Symmetry, zero diagonal and the triangle inequality are checked on load.
MetricSpace load_explicit_csv(const std::string& path);

// kappa(x)_i = d(x, landmark_i) - d(landmark_i, base).
class KuratowskiEmbedding {
public:
  KuratowskiEmbedding(MetricSpace space, Vec base_point, std::vector<Vec> landmarks);

  Vec embed(std::span<const double> x) const;
  int dim() const { return static_cast<int>(landmarks_.size()); }
  MetricSpace target() const { return MetricSpace::sup_norm(dim()); }
  // max |sup_dist(kappa p, kappa q) - d(p, q)| over the given sample points.
  double max_distortion(const std::vector<Vec>& sample) const;

private:
  MetricSpace space_;
  Vec base_;
  std::vector<Vec> landmarks_;
  Vec offsets_;  // d(landmark_i, base)
};

Vec kuratowski_embed(const MetricSpace& space, std::span<const double> x,
                     std::span<const double> base_point, const std::vector<Vec>& landmarks);

}  // namespace mgt
