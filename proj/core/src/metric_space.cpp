#include "mgt/metric_space.hpp"

#include <cmath>
#include <sstream>

#include "mgt/csv.hpp"
#include "mgt/errors.hpp"

namespace mgt {

MetricSpace MetricSpace::euclidean(int dim) {
  if (dim < 1) throw InvalidDims("euclidean: dimension must be >= 1");
  MetricSpace s;
  s.kind_ = SpaceKind::Euclidean;
  s.dim_ = dim;
  return s;
}

MetricSpace MetricSpace::sup_norm(int dim) {
  if (dim < 1) throw InvalidDims("sup_norm: dimension must be >= 1");
  MetricSpace s;
  s.kind_ = SpaceKind::SupNorm;
  s.dim_ = dim;
  return s;
}

MetricSpace MetricSpace::explicit_matrix(std::vector<double> table, std::vector<std::string> ids) {
  const int n = static_cast<int>(ids.size());
  if (n < 1) throw EmptyInput("explicit_matrix: no points");
  if (table.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionMismatch("explicit_matrix: table is not square");
  }
  for (int i = 0; i < n; ++i) {
    if (table[i * n + i] != 0.0) throw InvalidSpec("explicit_matrix: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      const double d = table[i * n + j];
      if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidSpec("explicit_matrix: bad entry");
      if (d != table[j * n + i]) throw InvalidSpec("explicit_matrix: not symmetric");
    }
  }
  // Triangle inequality over all triples; explicit spaces stay small.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (table[i * n + j] > table[i * n + k] + table[k * n + j] + 1e-12) {
          throw InvalidSpec("explicit_matrix: triangle inequality violated");
        }
      }
    }
  }
  MetricSpace s;
  s.kind_ = SpaceKind::ExplicitMatrix;
  s.size_ = n;
  s.table_ = std::move(table);
  s.ids_ = std::move(ids);
  return s;
}

MetricSpace MetricSpace::snowflake(MetricSpace base, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) throw InvalidSpec("snowflake: alpha must be in (0, 1]");
  if (base.kind_ == SpaceKind::Snowflake) {
    // Collapse nested wrappers; exponents multiply.
    alpha *= base.alpha_;
    base = *base.base_;
  }
  MetricSpace s;
  s.kind_ = SpaceKind::Snowflake;
  s.alpha_ = alpha;
  s.base_ = std::make_shared<const MetricSpace>(std::move(base));
  return s;
}

int MetricSpace::point_dim() const {
  switch (kind_) {
    case SpaceKind::Euclidean:
    case SpaceKind::SupNorm:
      return dim_;
    case SpaceKind::ExplicitMatrix:
      return 1;
    case SpaceKind::Snowflake:
      return base_->point_dim();
  }
  return 0;
}

int MetricSpace::coordinate_dim() const {
  switch (kind_) {
    case SpaceKind::Euclidean:
    case SpaceKind::SupNorm:
      return dim_;
    case SpaceKind::Snowflake:
      return base_->coordinate_dim();
    case SpaceKind::ExplicitMatrix:
      throw NonComponentTarget("explicit space has no coordinates");
  }
  return 0;
}

bool MetricSpace::componentwise() const {
  return kind_ == SpaceKind::Euclidean || kind_ == SpaceKind::SupNorm;
}

const MetricSpace& MetricSpace::base() const {
  if (kind_ != SpaceKind::Snowflake) throw InvalidSpec("base(): not a snowflake space");
  return *base_;
}

double MetricSpace::distance(std::span<const double> p, std::span<const double> q) const {
  switch (kind_) {
    case SpaceKind::Euclidean:
      if (static_cast<int>(p.size()) != dim_ || static_cast<int>(q.size()) != dim_) {
        throw DimensionMismatch("distance: point length != space dimension");
      }
      return euclid_dist(p, q);
    case SpaceKind::SupNorm:
      if (static_cast<int>(p.size()) != dim_ || static_cast<int>(q.size()) != dim_) {
        throw DimensionMismatch("distance: point length != space dimension");
      }
      return sup_dist(p, q);
    case SpaceKind::ExplicitMatrix: {
      if (p.size() != 1 || q.size() != 1) {
        throw DimensionMismatch("distance: explicit space expects id points");
      }
      const double pi = p[0], qi = q[0];
      if (pi != std::floor(pi) || qi != std::floor(qi)) {
        throw UnknownPoint("distance: non-integral point id");
      }
      return distance_ids(static_cast<int>(pi), static_cast<int>(qi));
    }
    case SpaceKind::Snowflake:
      return std::pow(base_->distance(p, q), alpha_);
  }
  return 0.0;
}

double MetricSpace::distance_ids(int i, int j) const {
  if (kind_ == SpaceKind::Snowflake) return std::pow(base_->distance_ids(i, j), alpha_);
  if (kind_ != SpaceKind::ExplicitMatrix) {
    throw UnknownPoint("distance_ids: space has no point ids");
  }
  if (i < 0 || i >= size_ || j < 0 || j >= size_) {
    throw UnknownPoint("distance_ids: id out of range");
  }
  return table_[static_cast<std::size_t>(i) * size_ + j];
}

std::string MetricSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::Euclidean: os << "euclidean(" << dim_ << ")"; break;
    case SpaceKind::SupNorm: os << "sup_norm(" << dim_ << ")"; break;
    case SpaceKind::ExplicitMatrix: os << "explicit(" << size_ << ")"; break;
    case SpaceKind::Snowflake: os << "snowflake(" << base_->describe() << ", " << alpha_ << ")"; break;
  }
  return os.str();
}

MetricSpace load_explicit_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int n = static_cast<int>(t.header.size());
  if (static_cast<int>(t.rows.size()) != n) {
    throw InvalidSpec("explicit matrix csv: expected " + std::to_string(n) + " rows");
  }
  std::vector<double> table(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      table[static_cast<std::size_t>(i) * n + j] = csv_number(t.rows[i][j], path);
    }
  }
  return MetricSpace::explicit_matrix(std::move(table), t.header);
}

KuratowskiEmbedding::KuratowskiEmbedding(MetricSpace space, Vec base_point,
                                         std::vector<Vec> landmarks)
    : space_(std::move(space)), base_(std::move(base_point)), landmarks_(std::move(landmarks)) {
  if (landmarks_.empty()) throw EmptyInput("kuratowski: no landmarks");
  offsets_.reserve(landmarks_.size());
  for (const auto& lm : landmarks_) {
    offsets_.push_back(space_.distance(lm, base_));
  }
}

Vec KuratowskiEmbedding::embed(std::span<const double> x) const {
  Vec out(landmarks_.size());
  for (std::size_t i = 0; i < landmarks_.size(); ++i) {
    out[i] = space_.distance(x, landmarks_[i]) - offsets_[i];
  }
  return out;
}

double KuratowskiEmbedding::max_distortion(const std::vector<Vec>& sample) const {
  double worst = 0.0;
  std::vector<Vec> images;
  images.reserve(sample.size());
  for (const auto& p : sample) images.push_back(embed(p));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      const double d = space_.distance(sample[i], sample[j]);
      const double e = sup_dist(images[i], images[j]);
      worst = std::max(worst, std::fabs(d - e));
    }
  }
  return worst;
}

Vec kuratowski_embed(const MetricSpace& space, std::span<const double> x,
                     std::span<const double> base_point, const std::vector<Vec>& landmarks) {
  KuratowskiEmbedding emb(space, Vec(base_point.begin(), base_point.end()), landmarks);
  return emb.embed(x);
}

}  // namespace mgt
