#include "mgt/sampled_map.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/errors.hpp"

namespace mgt {

std::shared_ptr<const MapRule> MapRule::smooth_model_at(std::span<const double> x0) const {
  (void)x0;
  return nullptr;  // the rule is its own smooth model
}

namespace {

// Multilinear interpolation over cached node samples.
class GridInterpRule final : public MapRule {
public:
  GridInterpRule(GridSpec grid, int tdim, std::shared_ptr<const std::vector<double>> samples)
      : grid_(std::move(grid)), tdim_(tdim), samples_(std::move(samples)) {}

  int domain_dim() const override { return grid_.dim(); }
  int target_dim() const override { return tdim_; }
  std::string kind() const override { return "grid"; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    const int k = grid_.dim();
    if (static_cast<int>(x.size()) != k) throw DimensionMismatch("grid map: bad point length");
    if (!grid_.box().contains(x, 1e-12)) throw OutOfDomain("grid map: point outside sampled box");
    std::vector<int> base(k);
    std::vector<double> t(k);
    for (int a = 0; a < k; ++a) {
      const double rel = (x[a] - grid_.box().lo[a]) / grid_.spacing(a);
      int i = static_cast<int>(std::floor(rel));
      i = std::clamp(i, 0, grid_.nodes(a) - 2);
      base[a] = i;
      t[a] = std::clamp(rel - i, 0.0, 1.0);
    }
    std::fill(out.begin(), out.end(), 0.0);
    const auto& s = *samples_;
    std::vector<int> mi(k);
    for (unsigned corner = 0; corner < (1u << k); ++corner) {
      double w = 1.0;
      for (int a = 0; a < k; ++a) {
        const bool hi = corner & (1u << a);
        mi[a] = base[a] + (hi ? 1 : 0);
        w *= hi ? t[a] : 1.0 - t[a];
      }
      if (w == 0.0) continue;
      const std::size_t flat = grid_.flat_index(mi);
      for (int c = 0; c < tdim_; ++c) out[c] += w * s[flat * tdim_ + c];
    }
  }

private:
  GridSpec grid_;
  int tdim_;
  std::shared_ptr<const std::vector<double>> samples_;
};

}  // namespace

SampledMap::SampledMap(GridSpec grid, MetricSpace target, std::shared_ptr<const MapRule> rule,
                       std::optional<double> lip_hint)
    : grid_(std::move(grid)), target_(std::move(target)), rule_(std::move(rule)),
      lip_hint_(lip_hint) {
  if (!rule_) throw InvalidSpec("SampledMap: null rule");
  if (rule_->domain_dim() != grid_.dim()) {
    throw DimensionMismatch("SampledMap: rule domain does not match grid");
  }
  if (rule_->target_dim() != target_.point_dim()) {
    throw DimensionMismatch("SampledMap: rule target does not match space");
  }
  cache_nodes();
  validate_lip_hint();
}

SampledMap::SampledMap(GridSpec grid, MetricSpace target, std::vector<double> samples,
                       std::optional<double> lip_hint)
    : grid_(std::move(grid)), target_(std::move(target)), lip_hint_(lip_hint) {
  const std::size_t want = grid_.count() * static_cast<std::size_t>(target_.point_dim());
  if (samples.size() != want) {
    throw DimensionMismatch("SampledMap: sample table size does not match grid");
  }
  samples_ = std::move(samples);
  if (target_.componentwise()) {
    auto shared = std::make_shared<const std::vector<double>>(samples_);
    rule_ = std::make_shared<GridInterpRule>(grid_, target_.point_dim(), std::move(shared));
  }
  compute_axis_lipschitz();
  validate_lip_hint();
}

const MapRule& SampledMap::rule() const {
  if (!rule_) throw NonComponentTarget("map has no evaluable rule (explicit-target samples)");
  return *rule_;
}

Vec SampledMap::evaluate(std::span<const double> x) const {
  Vec out(target_.point_dim());
  rule().eval(x, out);
  return out;
}

std::span<const double> SampledMap::node_image(std::size_t flat) const {
  const auto tdim = static_cast<std::size_t>(target_.point_dim());
  return {samples_.data() + flat * tdim, tdim};
}

void SampledMap::cache_nodes() {
  const int tdim = target_.point_dim();
  samples_.resize(grid_.count() * static_cast<std::size_t>(tdim));
  Vec x(grid_.dim());
  for (std::size_t f = 0; f < grid_.count(); ++f) {
    grid_.node_into(f, x);
    rule_->eval(x, {samples_.data() + f * static_cast<std::size_t>(tdim),
                    static_cast<std::size_t>(tdim)});
  }
  compute_axis_lipschitz();
}

void SampledMap::compute_axis_lipschitz() {
  const int k = grid_.dim();
  std::vector<std::size_t> stride(k, 1);
  for (int a = k - 2; a >= 0; --a) stride[a] = stride[a + 1] * grid_.nodes(a + 1);
  std::vector<int> mi(k);
  double lip = 0.0;
  for (std::size_t f = 0; f < grid_.count(); ++f) {
    grid_.multi_index(f, mi);
    for (int a = 0; a < k; ++a) {
      if (mi[a] + 1 >= grid_.nodes(a)) continue;
      const double d = target_.distance(node_image(f), node_image(f + stride[a]));
      lip = std::max(lip, d / grid_.spacing(a));
    }
  }
  lip_axis_ = lip;
}

void SampledMap::validate_lip_hint() const {
  if (!lip_hint_) return;
  if (*lip_hint_ < 0.0) throw InvalidSpec("lip_hint must be nonnegative");
  if (lip_axis_ > *lip_hint_ * (1.0 + 1e-9) + 1e-15) {
    throw InvalidSpec("lip_hint contradicts sampled differences");
  }
}

double SampledMap::lipschitz_all_pairs() const {
  const std::size_t n = grid_.count();
  Vec p(grid_.dim()), q(grid_.dim());
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    grid_.node_into(i, p);
    for (std::size_t j = i + 1; j < n; ++j) {
      grid_.node_into(j, q);
      const double dx = euclid_dist(p, q);
      if (dx == 0.0) continue;
      lip = std::max(lip, target_.distance(node_image(i), node_image(j)) / dx);
    }
  }
  return lip;
}

double SampledMap::crease_distance(std::span<const double> x) const {
  if (!rule_) return std::numeric_limits<double>::infinity();
  return rule_->crease_distance(x);
}

std::shared_ptr<const MapRule> SampledMap::smooth_model_at(std::span<const double> x0) const {
  auto local = rule().smooth_model_at(x0);
  return local ? local : rule_;
}

double lipschitz_estimate(const SampledMap& map, LipschitzMode mode) {
  return mode == LipschitzMode::AxisAdjacent ? map.lipschitz_axis_estimate()
                                             : map.lipschitz_all_pairs();
}

}  // namespace mgt
