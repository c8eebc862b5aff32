#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgt/geometry.hpp"
#include "mgt/metric_space.hpp"

namespace mgt {

// Closed-form presentation of a map. Rules are immutable and shared.
class MapRule {
public:
  virtual ~MapRule() = default;

  virtual int domain_dim() const = 0;
  virtual int target_dim() const = 0;
  virtual void eval(std::span<const double> x, std::span<double> out) const = 0;
  virtual std::string kind() const = 0;

  virtual bool affine() const { return false; }

  // Smooth map agreeing with this one on the piece containing x0. Charts are
  // built from the model; piecewise rules return the extended local branch.
  virtual std::shared_ptr<const MapRule> smooth_model_at(std::span<const double> x0) const;

  // Distance from x to the nearest non-smooth locus, +inf for smooth rules.
  virtual double crease_distance(std::span<const double> x) const {
    (void)x;
    return std::numeric_limits<double>::infinity();
  }

  // Kind-specific parameters serialized as a JSON object string.
  virtual std::string params_json() const { return "{}"; }
};

// A map presented either by a rule or by per-node samples over a grid.
// Node images are cached at construction; handles are immutable afterwards.
class SampledMap {
public:
  SampledMap(GridSpec grid, MetricSpace target, std::shared_ptr<const MapRule> rule,
             std::optional<double> lip_hint = std::nullopt);
  SampledMap(GridSpec grid, MetricSpace target, std::vector<double> samples,
             std::optional<double> lip_hint = std::nullopt);

  const GridSpec& grid() const { return grid_; }
  const MetricSpace& target() const { return target_; }
  int domain_dim() const { return grid_.dim(); }
  int target_dim() const { return target_.point_dim(); }

  bool has_rule() const { return rule_ != nullptr; }
  // True for analytic rules; grid presentations carry an interpolant rule
  // whose accuracy is tied to the pitch.
  bool closed_form() const { return rule_ != nullptr && rule_->kind() != "grid"; }
  const MapRule& rule() const;
  std::shared_ptr<const MapRule> rule_ptr() const { return rule_; }

  // Rule evaluation, or multilinear interpolation for grid presentations.
  Vec evaluate(std::span<const double> x) const;
  std::span<const double> node_image(std::size_t flat) const;

  std::optional<double> lip_hint() const { return lip_hint_; }
  double lipschitz_axis_estimate() const { return lip_axis_; }
  double lipschitz_all_pairs() const;
  // Analytic hint when declared, otherwise the axis estimate. Used wherever a
  // Lipschitz scale enters (inflation radii, pixel pitch, ratio bounds).
  double effective_lipschitz() const { return lip_hint_ ? *lip_hint_ : lip_axis_; }

  double crease_distance(std::span<const double> x) const;
  std::shared_ptr<const MapRule> smooth_model_at(std::span<const double> x0) const;

private:
  void cache_nodes();
  void compute_axis_lipschitz();
  void validate_lip_hint() const;

  GridSpec grid_;
  MetricSpace target_;
  std::shared_ptr<const MapRule> rule_;
  std::vector<double> samples_;  // count() x target_dim(), node-major
  std::optional<double> lip_hint_;
  double lip_axis_ = 0.0;
};

// Max over sampled pairs of d(f(p), f(q)) / |p - q|. Axis-adjacent pairs by
// default; all_pairs is quadratic and intended for small grids.
enum class LipschitzMode { AxisAdjacent, AllPairs };
double lipschitz_estimate(const SampledMap& map, LipschitzMode mode = LipschitzMode::AxisAdjacent);

// JSON manifest I/O. Grid-presented maps reference a CSV of image
// coordinates, one row per node in node-major order.
SampledMap load_map_manifest(const std::string& path);
void save_map_manifest(const SampledMap& map, const std::string& path);

}  // namespace mgt
