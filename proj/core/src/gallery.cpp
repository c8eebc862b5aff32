#include "mgt/gallery.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mgt/csv.hpp"
#include "mgt/errors.hpp"

namespace mgt {

using nlohmann::json;

namespace {

class AffineRule final : public MapRule {
public:
  AffineRule(std::string kind, std::vector<double> matrix, Vec offset, int rows, int cols,
             std::string params)
      : kind_(std::move(kind)), m_(std::move(matrix)), b_(std::move(offset)), rows_(rows),
        cols_(cols), params_(std::move(params)) {}

  int domain_dim() const override { return cols_; }
  int target_dim() const override { return rows_; }
  std::string kind() const override { return kind_; }
  bool affine() const override { return true; }
  std::string params_json() const override { return params_; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    for (int r = 0; r < rows_; ++r) {
      double s = b_[r];
      for (int c = 0; c < cols_; ++c) s += m_[static_cast<std::size_t>(r) * cols_ + c] * x[c];
      out[r] = s;
    }
  }

private:
  std::string kind_;
  std::vector<double> m_;
  Vec b_;
  int rows_, cols_;
  std::string params_;
};

class PolyRule final : public MapRule {
public:
  PolyRule(std::vector<std::vector<PolyTerm>> components, int domain_dim)
      : comps_(std::move(components)), k_(domain_dim) {}

  int domain_dim() const override { return k_; }
  int target_dim() const override { return static_cast<int>(comps_.size()); }
  std::string kind() const override { return "poly"; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      double s = 0.0;
      for (const auto& t : comps_[c]) {
        double term = t.coef;
        for (int a = 0; a < k_; ++a) {
          for (int p = 0; p < t.powers[a]; ++p) term *= x[a];
        }
        s += term;
      }
      out[c] = s;
    }
  }

  std::string params_json() const override {
    json comps = json::array();
    for (const auto& comp : comps_) {
      json terms = json::array();
      for (const auto& t : comp) terms.push_back({{"coef", t.coef}, {"powers", t.powers}});
      comps.push_back(terms);
    }
    return json{{"components", comps}}.dump();
  }

private:
  std::vector<std::vector<PolyTerm>> comps_;
  int k_;
};

class ConstantRule final : public MapRule {
public:
  explicit ConstantRule(Vec value, int domain_dim) : v_(std::move(value)), k_(domain_dim) {}

  int domain_dim() const override { return k_; }
  int target_dim() const override { return static_cast<int>(v_.size()); }
  std::string kind() const override { return "constant"; }
  bool affine() const override { return true; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    (void)x;
    std::copy(v_.begin(), v_.end(), out.begin());
  }

  std::string params_json() const override { return json{{"value", v_}}.dump(); }

private:
  Vec v_;
  int k_;
};

class FoldRule final : public MapRule {
public:
  explicit FoldRule(int stages) : n_(stages) {}

  int domain_dim() const override { return 2; }
  int target_dim() const override { return 1; }
  std::string kind() const override { return "fold"; }
  std::string params_json() const override { return json{{"N", n_}}.dump(); }

  void eval(std::span<const double> x, std::span<double> out) const override {
    out[0] = fold_pre_projection(n_, x[0], x[1])[0];
  }

  // The composed map only reads the first coordinate; its kinks sit on the
  // vertical lines x = j * 2^-N.
  double crease_distance(std::span<const double> x) const override {
    const double pitch = std::ldexp(1.0, -n_);
    const double nearest = pitch * std::round(x[0] / pitch);
    return std::fabs(x[0] - nearest);
  }

  std::shared_ptr<const MapRule> smooth_model_at(std::span<const double> x0) const override {
    // Extend the monotone branch through x0 to a global affine map.
    const double period = std::ldexp(1.0, 1 - n_);
    const double valley = period * std::round(x0[0] / period);
    const double sign = x0[0] >= valley ? 1.0 : -1.0;
    std::vector<double> m = {sign, 0.0};
    Vec b = {-sign * valley};
    json params = {{"matrix", {{sign, 0.0}}}, {"offset", b}};
    return std::make_shared<AffineRule>("linear", std::move(m), std::move(b), 1, 2,
                                        params.dump());
  }

private:
  int n_;
};

class KuratowskiImageRule final : public MapRule {
public:
  KuratowskiImageRule(std::shared_ptr<const SampledMap> base, std::vector<Vec> landmarks,
                      int stride)
      : base_(std::move(base)),
        emb_(base_->target(), landmarks.front(), landmarks),
        stride_(stride) {}

  int domain_dim() const override { return base_->domain_dim(); }
  int target_dim() const override { return emb_.dim(); }
  std::string kind() const override { return "kuratowski_image"; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    const Vec y = base_->evaluate(x);
    const Vec e = emb_.embed(y);
    std::copy(e.begin(), e.end(), out.begin());
  }

  double crease_distance(std::span<const double> x) const override {
    return base_->crease_distance(x);
  }

  const SampledMap& base() const { return *base_; }
  int stride() const { return stride_; }

  std::string params_json() const override {
    return json{{"landmark_stride", stride_}}.dump();
  }

private:
  std::shared_ptr<const SampledMap> base_;
  KuratowskiEmbedding emb_;
  int stride_;
};

Box unit_box(int k) {
  Box b;
  b.lo.assign(k, 0.0);
  b.hi.assign(k, 1.0);
  return b;
}

double spectral_norm(const std::vector<std::vector<double>>& matrix) {
  const int rows = static_cast<int>(matrix.size());
  const int cols = static_cast<int>(matrix.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = matrix[r][c];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

std::array<double, 2> fold_stage(int n, double x, double y) {
  if (n < 1) throw InvalidSpec("fold_stage: stage index must be >= 1");
  const double half = std::ldexp(1.0, -n);        // 2^-n
  const double full = std::ldexp(1.0, -(n - 1));  // side of the stage domain
  const double gx = x <= half ? x : full - x;
  const double gy = y <= half ? y : full - y;
  return {gx, gy};
}

std::array<double, 2> fold_pre_projection(int stages, double x, double y) {
  std::array<double, 2> p{x, y};
  for (int n = 1; n <= stages; ++n) p = fold_stage(n, p[0], p[1]);
  return p;
}

double fold_K_bound(double lambda, int stages) {
  if (!(lambda >= 1.0)) throw InvalidLambda("fold_K_bound: lambda must be >= 1");
  if (stages < 1) throw InvalidSpec("fold_K_bound: stages must be >= 1");
  return std::pow(lambda, 4.0) * std::ldexp(1.0, 1 - stages) * std::sqrt(2.0);
}

double fold_slice_capacity(const SampledMap& map, double lambda, double y) {
  if (!(lambda > 1.0)) throw InvalidLambda("fold_slice_capacity: lambda must be > 1");
  if (map.domain_dim() != 2) throw InvalidDims("fold_slice_capacity: domain must be 2d");
  if (!map.target().componentwise() || map.target_dim() != 1) {
    throw NonComponentTarget("fold_slice_capacity: target must be a 1d coordinate space");
  }
  const GridSpec& g = map.grid();
  const int nx = g.nodes(0);
  const double h = g.spacing(0);
  std::vector<double> xs(nx), fs(nx);
  Vec p(2);
  p[1] = y;
  for (int i = 0; i < nx; ++i) {
    xs[i] = g.coord(0, i);
    p[0] = xs[i];
    fs[i] = map.evaluate(p)[0];
  }
  std::vector<int> accepted;
  for (int i = 0; i < nx; ++i) {
    bool ok = true;
    for (int a : accepted) {
      const double dx = xs[i] - xs[a];
      const double df = std::fabs(fs[i] - fs[a]);
      if (df > lambda * dx || df * lambda < dx) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(i);
  }
  // measure of the filled-in accepted set: a cell counts only when both of
  // its endpoints survive, so isolated nodes contribute nothing
  double measure = 0.0;
  for (std::size_t t = 1; t < accepted.size(); ++t) {
    if (accepted[t] == accepted[t - 1] + 1) measure += h;
  }
  return measure;
}

double coarea_rhs(int n, int m, double lip, double measure) {
  if (n < 1 || m < 0 || m > n) throw InvalidDims("coarea_rhs: need 0 <= m <= n, n >= 1");
  if (lip < 0.0 || measure < 0.0) throw InvalidSpec("coarea_rhs: negative input");
  const double c = unit_ball_volume(n - m) * unit_ball_volume(m) / unit_ball_volume(n);
  return std::pow(lip, m) * c * measure;
}

SampledMap make_projection_map(int domain_dim, int n, Box box, std::vector<int> grid) {
  if (n < 1 || n > domain_dim) throw InvalidDims("projection: need 1 <= n <= domain_dim");
  std::vector<double> m(static_cast<std::size_t>(n) * domain_dim, 0.0);
  for (int r = 0; r < n; ++r) m[static_cast<std::size_t>(r) * domain_dim + r] = 1.0;
  json params = {{"n", n}};
  auto rule = std::make_shared<AffineRule>("projection", std::move(m), Vec(n, 0.0), n,
                                           domain_dim, params.dump());
  return SampledMap(GridSpec(std::move(box), std::move(grid)), MetricSpace::euclidean(n),
                    std::move(rule), 1.0);
}

SampledMap make_linear_map(const std::vector<std::vector<double>>& matrix, Box box,
                           std::vector<int> grid) {
  return make_affine_map(matrix, Vec(matrix.size(), 0.0), std::move(box), std::move(grid));
}

SampledMap make_affine_map(const std::vector<std::vector<double>>& matrix, const Vec& offset,
                           Box box, std::vector<int> grid) {
  if (matrix.empty() || matrix.front().empty()) throw InvalidSpec("affine: empty matrix");
  const int rows = static_cast<int>(matrix.size());
  const int cols = static_cast<int>(matrix.front().size());
  if (static_cast<int>(offset.size()) != rows) throw DimensionMismatch("affine: offset length");
  std::vector<double> m;
  m.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != cols) throw InvalidSpec("affine: ragged matrix");
    m.insert(m.end(), row.begin(), row.end());
  }
  json params = {{"matrix", matrix}, {"offset", offset}};
  auto rule = std::make_shared<AffineRule>("linear", std::move(m), offset, rows, cols,
                                           params.dump());
  const double lip = spectral_norm(matrix);
  return SampledMap(GridSpec(std::move(box), std::move(grid)), MetricSpace::euclidean(rows),
                    std::move(rule), lip);
}

SampledMap make_poly_map(const std::vector<std::vector<PolyTerm>>& components, Box box,
                         std::vector<int> grid, std::optional<double> lip_hint) {
  if (components.empty()) throw InvalidSpec("poly: no components");
  const int k = box.dim();
  for (const auto& comp : components) {
    for (const auto& t : comp) {
      if (static_cast<int>(t.powers.size()) != k) {
        throw DimensionMismatch("poly: exponent tuple length != domain dimension");
      }
      for (int p : t.powers) {
        if (p < 0) throw InvalidSpec("poly: negative exponent");
      }
    }
  }
  auto rule = std::make_shared<PolyRule>(components, k);
  return SampledMap(GridSpec(std::move(box), std::move(grid)),
                    MetricSpace::euclidean(static_cast<int>(components.size())),
                    std::move(rule), lip_hint);
}

SampledMap make_constant_map(const Vec& value, Box box, std::vector<int> grid) {
  if (value.empty()) throw InvalidSpec("constant: empty value");
  auto rule = std::make_shared<ConstantRule>(value, box.dim());
  return SampledMap(GridSpec(std::move(box), std::move(grid)),
                    MetricSpace::euclidean(static_cast<int>(value.size())), std::move(rule),
                    0.0);
}

SampledMap make_fold_map(int stages, std::vector<int> grid) {
  if (stages < 1 || stages > 40) throw InvalidSpec("fold: stages must be in [1, 40]");
  auto rule = std::make_shared<FoldRule>(stages);
  return SampledMap(GridSpec(unit_box(2), std::move(grid)), MetricSpace::euclidean(1),
                    std::move(rule), 1.0);
}

SampledMap make_kuratowski_image_map(const SampledMap& base, int landmark_stride) {
  if (landmark_stride < 1) throw InvalidSpec("kuratowski_image: stride must be >= 1");
  std::vector<Vec> landmarks;
  for (std::size_t f = 0; f < base.grid().count(); f += static_cast<std::size_t>(landmark_stride)) {
    const auto img = base.node_image(f);
    landmarks.emplace_back(img.begin(), img.end());
  }
  auto shared = std::make_shared<const SampledMap>(base);
  auto rule = std::make_shared<KuratowskiImageRule>(shared, std::move(landmarks),
                                                    landmark_stride);
  const int dim = rule->target_dim();
  return SampledMap(base.grid(), MetricSpace::sup_norm(dim), std::move(rule),
                    base.lip_hint());
}

std::vector<std::string> gallery_kinds() {
  return {"projection", "linear", "poly", "constant", "fold", "kuratowski_image", "grid"};
}

namespace {

MetricSpace target_from_json(const json& j, const std::string& base_dir) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") return MetricSpace::euclidean(j.at("dim").get<int>());
  if (kind == "sup_norm") return MetricSpace::sup_norm(j.at("dim").get<int>());
  if (kind == "snowflake") {
    return MetricSpace::snowflake(target_from_json(j.at("base"), base_dir),
                                  j.at("alpha").get<double>());
  }
  if (kind == "explicit") {
    const auto csv = std::filesystem::path(base_dir) / j.at("csv").get<std::string>();
    return load_explicit_csv(csv.string());
  }
  throw InvalidSpec("unknown target kind: " + kind);
}

json target_to_json(const MetricSpace& t) {
  switch (t.kind()) {
    case SpaceKind::Euclidean: return {{"kind", "euclidean"}, {"dim", t.point_dim()}};
    case SpaceKind::SupNorm: return {{"kind", "sup_norm"}, {"dim", t.point_dim()}};
    case SpaceKind::Snowflake: {
      json j = {{"kind", "snowflake"}, {"alpha", t.alpha()}};
      j["base"] = target_to_json(t.base());
      return j;
    }
    case SpaceKind::ExplicitMatrix:
      throw InvalidSpec("explicit-target manifests must reference their csv by hand");
  }
  throw InvalidSpec("unreachable target kind");
}

SampledMap map_from_json(const json& j, const std::string& base_dir) {
  const std::string kind = j.at("kind").get<std::string>();
  json params = j.value("params", json::object());

  std::vector<int> grid = j.at("grid").get<std::vector<int>>();
  Box box;
  if (j.contains("box")) {
    box.lo = j["box"].at("lo").get<Vec>();
    box.hi = j["box"].at("hi").get<Vec>();
  } else if (kind == "fold") {
    box = unit_box(2);
  } else {
    throw InvalidSpec("manifest: missing box");
  }

  std::optional<double> lip_hint;
  if (j.contains("lip_hint")) lip_hint = j["lip_hint"].get<double>();

  if (kind == "projection") {
    auto m = make_projection_map(box.dim(), params.at("n").get<int>(), box, grid);
    return lip_hint ? SampledMap(m.grid(), m.target(), m.rule_ptr(), lip_hint) : m;
  }
  if (kind == "linear") {
    const auto matrix = params.at("matrix").get<std::vector<std::vector<double>>>();
    Vec offset(matrix.size(), 0.0);
    if (params.contains("offset")) offset = params["offset"].get<Vec>();
    auto m = make_affine_map(matrix, offset, box, grid);
    return lip_hint ? SampledMap(m.grid(), m.target(), m.rule_ptr(), lip_hint) : m;
  }
  if (kind == "poly") {
    std::vector<std::vector<PolyTerm>> comps;
    for (const auto& comp : params.at("components")) {
      std::vector<PolyTerm> terms;
      for (const auto& t : comp) {
        PolyTerm term;
        term.coef = t.at("coef").get<double>();
        term.powers = t.at("powers").get<std::vector<int>>();
        terms.push_back(std::move(term));
      }
      comps.push_back(std::move(terms));
    }
    return make_poly_map(comps, box, grid, lip_hint);
  }
  if (kind == "constant") {
    return make_constant_map(params.at("value").get<Vec>(), box, grid);
  }
  if (kind == "fold") {
    if (box.dim() != 2 || box.lo != Vec{0.0, 0.0} || box.hi != Vec{1.0, 1.0}) {
      throw InvalidSpec("fold: domain is fixed to the unit square");
    }
    return make_fold_map(params.at("N").get<int>(), grid);
  }
  if (kind == "kuratowski_image") {
    SampledMap base = map_from_json(params.at("base"), base_dir);
    return make_kuratowski_image_map(base, params.at("landmark_stride").get<int>());
  }
  if (kind == "grid") {
    MetricSpace target = target_from_json(j.at("target"), base_dir);
    const auto csv_path = std::filesystem::path(base_dir) / params.at("csv").get<std::string>();
    const CsvTable t = read_csv(csv_path.string());
    GridSpec gs(box, grid);
    const int tdim = target.point_dim();
    if (t.rows.size() != gs.count() || static_cast<int>(t.header.size()) != tdim) {
      throw InvalidSpec("grid manifest: csv shape does not match grid/target");
    }
    std::vector<double> samples;
    samples.reserve(gs.count() * static_cast<std::size_t>(tdim));
    for (const auto& row : t.rows) {
      for (const auto& field : row) samples.push_back(csv_number(field, csv_path.string()));
    }
    return SampledMap(std::move(gs), std::move(target), std::move(samples), lip_hint);
  }
  throw InvalidSpec("unknown map kind: " + kind);
}

}  // namespace

SampledMap make_map_json(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("manifest parse error: ") + e.what());
  }
  try {
    return map_from_json(j, base_dir);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("manifest field error: ") + e.what());
  }
}

SampledMap load_map_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return make_map_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

void save_map_manifest(const SampledMap& map, const std::string& path) {
  json j;
  const auto& g = map.grid();
  j["grid"] = g.nodes();
  j["box"] = {{"lo", g.box().lo}, {"hi", g.box().hi}};
  if (map.lip_hint()) j["lip_hint"] = *map.lip_hint();

  const bool has_closed_form = map.has_rule() && map.rule().kind() != "grid";
  if (has_closed_form) {
    const auto& r = map.rule();
    j["kind"] = r.kind();
    j["params"] = json::parse(r.params_json());
    if (r.kind() == "kuratowski_image") {
      // Re-embed the base map so the manifest is self-contained.
      const auto& kr = dynamic_cast<const KuratowskiImageRule&>(r);
      json base;
      {
        const auto tmp = std::filesystem::path(path).string() + ".base.json";
        save_map_manifest(kr.base(), tmp);
        std::ifstream bin(tmp);
        bin >> base;
        std::filesystem::remove(tmp);
      }
      j["params"]["base"] = base;
    }
    if (r.kind() != "projection" && r.kind() != "fold" && r.kind() != "kuratowski_image") {
      j["target"] = target_to_json(map.target());
    }
  } else {
    j["kind"] = "grid";
    j["target"] = target_to_json(map.target());
    std::filesystem::path csv = std::filesystem::path(path);
    csv.replace_extension("");
    csv += "-samples.csv";
    const int tdim = map.target_dim();
    std::vector<std::string> header;
    for (int c = 0; c < tdim; ++c) header.push_back("y" + std::to_string(c));
    CsvWriter w(header);
    std::vector<std::string> row(tdim);
    for (std::size_t f = 0; f < g.count(); ++f) {
      const auto img = map.node_image(f);
      for (int c = 0; c < tdim; ++c) row[c] = format_double(img[c]);
      w.row(row);
    }
    w.save(csv.string());
    j["params"] = {{"csv", csv.filename().string()}};
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mgt
