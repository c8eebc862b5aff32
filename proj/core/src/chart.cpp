#include "mgt/chart.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "mgt/errors.hpp"
#include "mgt/parallel.hpp"

namespace mgt {

using nlohmann::json;

namespace {

Vec eval_rule(const MapRule& r, std::span<const double> x) {
  Vec out(static_cast<std::size_t>(r.target_dim()));
  r.eval(x, out);
  return out;
}

void clamp_into(Vec& x, const Box& box) {
  for (std::size_t a = 0; a < x.size(); ++a)
    x[a] = std::min(std::max(x[a], box.lo[a]), box.hi[a]);
}

double comb_count(int a, int b) {
  double c = 1.0;
  for (int i = 0; i < b; ++i) c *= static_cast<double>(a - i) / (i + 1);
  return c;
}

bool next_combination(std::vector<int>& c, int limit) {
  const int n = static_cast<int>(c.size());
  for (int i = n - 1; i >= 0; --i) {
    if (c[i] < limit - (n - i)) {
      ++c[i];
      for (int j = i + 1; j < n; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double subdet(const DerivativeSample& d, const std::vector<int>& rows,
              const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = d.entry(rows[i], cols[j]);
  return m.determinant();
}

// Column j of the model derivative restricted to the chart rows, written
// into J. Affine rules difference exactly with unit probes.
void model_minor_column(const Chart& c, std::span<const double> x, int j, Eigen::MatrixXd& J) {
  const int a = c.domain_cols[j];
  const bool grid_model = c.model->kind() == "grid";
  const double s = c.model->affine() ? 1.0 : c.fd_step;
  Vec p(x.begin(), x.end());
  Vec q(x.begin(), x.end());
  p[a] = x[a] + s;
  q[a] = x[a] - s;
  if (grid_model) {
    clamp_into(p, c.domain);
    clamp_into(q, c.domain);
  }
  const auto fp = eval_rule(*c.model, p);
  const auto fq = eval_rule(*c.model, q);
  const double denom = p[a] - q[a];
  for (int i = 0; i < c.n; ++i)
    J(i, j) = denom != 0.0 ? (fp[c.image_rows[i]] - fq[c.image_rows[i]]) / denom : 0.0;
}

Eigen::MatrixXd minor_jacobian(const Chart& c, std::span<const double> x) {
  Eigen::MatrixXd J(c.n, c.n);
  for (int j = 0; j < c.n; ++j) model_minor_column(c, x, j, J);
  return J;
}

double minor_det_at(const Chart& c, std::span<const double> x) {
  return minor_jacobian(c, x).determinant();
}

Vec head_at(const Chart& c, std::span<const double> x) {
  const auto out = eval_rule(*c.model, x);
  Vec h(static_cast<std::size_t>(c.n));
  for (int i = 0; i < c.n; ++i) h[i] = out[c.image_rows[i]];
  return h;
}

// Full k x k chart derivative at x: model rows over all axes, unit rows for
// the tail. Used for the bi-Lipschitz certificate only.
Eigen::MatrixXd full_jacobian(const Chart& c, std::span<const double> x) {
  const int k = static_cast<int>(c.x0.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
  const bool grid_model = c.model->kind() == "grid";
  const double s = c.model->affine() ? 1.0 : c.fd_step;
  for (int a = 0; a < k; ++a) {
    Vec p(x.begin(), x.end());
    Vec q(x.begin(), x.end());
    p[a] = x[a] + s;
    q[a] = x[a] - s;
    if (grid_model) {
      clamp_into(p, c.domain);
      clamp_into(q, c.domain);
    }
    const auto fp = eval_rule(*c.model, p);
    const auto fq = eval_rule(*c.model, q);
    const double denom = p[a] - q[a];
    for (int i = 0; i < c.n; ++i)
      J(i, a) = denom != 0.0 ? (fp[c.image_rows[i]] - fq[c.image_rows[i]]) / denom : 0.0;
  }
  const auto tails = c.tail_axes();
  for (std::size_t t = 0; t < tails.size(); ++t) J(c.n + static_cast<int>(t), tails[t]) = 1.0;
  return J;
}

std::vector<Vec> lattice_probes(const Vec& x0, const std::vector<double>& halfw) {
  const int k = static_cast<int>(x0.size());
  std::vector<Vec> probes;
  std::vector<int> step(k, -1);
  for (;;) {
    Vec p(x0);
    for (int a = 0; a < k; ++a) p[a] += step[a] * halfw[a];
    probes.push_back(std::move(p));
    int a = k - 1;
    while (a >= 0 && ++step[a] > 1) {
      step[a] = -1;
      --a;
    }
    if (a < 0) break;
  }
  return probes;
}

}  // namespace

MinorSelection select_minor(const DerivativeSample& d, int n, double rank_tol) {
  const int nr = d.rows;
  const int nc = d.cols;
  if (n < 1 || n > std::min(nr, nc))
    throw InvalidDims("minor: order must fit the matrix shape");

  double smax = 0.0;
  if (!d.singular_values.empty()) {
    smax = d.singular_values.front();
  } else {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        d.matrix.data(), nr, nc);
    smax = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  }
  if (smax <= 0.0) throw NoFullRankMinor("minor: derivative vanishes");

  MinorSelection best;
  double best_abs = -1.0;
  if (comb_count(nr, n) * comb_count(nc, n) <= 1.0e4) {
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = i;
    do {
      std::vector<int> cols(n);
      for (int j = 0; j < n; ++j) cols[j] = j;
      do {
        const double det = subdet(d, rows, cols);
        if (std::abs(det) > best_abs) {
          best_abs = std::abs(det);
          best = {rows, cols, det};
        }
      } while (next_combination(cols, nc));
    } while (next_combination(rows, nr));
  } else {
    // complete pivoting: pick the largest remaining entry, eliminate, repeat
    Eigen::MatrixXd a(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) a(i, j) = d.entry(i, j);
    std::vector<bool> used_r(nr, false), used_c(nc, false);
    std::vector<int> rows, cols;
    for (int step = 0; step < n; ++step) {
      int pi = -1, pj = -1;
      double pv = -1.0;
      for (int i = 0; i < nr; ++i) {
        if (used_r[i]) continue;
        for (int j = 0; j < nc; ++j) {
          if (used_c[j]) continue;
          if (std::abs(a(i, j)) > pv) {
            pv = std::abs(a(i, j));
            pi = i;
            pj = j;
          }
        }
      }
      if (pv <= 0.0) break;
      used_r[pi] = true;
      used_c[pj] = true;
      rows.push_back(pi);
      cols.push_back(pj);
      for (int i = 0; i < nr; ++i) {
        if (used_r[i] || a(i, pj) == 0.0) continue;
        a.row(i) -= a(i, pj) / a(pi, pj) * a.row(pi);
      }
    }
    if (static_cast<int>(rows.size()) == n) {
      std::sort(rows.begin(), rows.end());
      std::sort(cols.begin(), cols.end());
      best = {rows, cols, subdet(d, rows, cols)};
      best_abs = std::abs(best.det);
    }
  }

  if (best_abs < rank_tol * std::pow(smax, n))
    throw NoFullRankMinor("minor: rank below " + std::to_string(n) + " at this point");
  return best;
}

std::vector<int> Chart::tail_axes() const {
  std::vector<int> tails;
  const int k = static_cast<int>(x0.size());
  for (int a = 0; a < k; ++a)
    if (std::find(domain_cols.begin(), domain_cols.end(), a) == domain_cols.end())
      tails.push_back(a);
  return tails;
}

Vec chart_forward(const Chart& c, std::span<const double> x) {
  if (x.size() != c.x0.size()) throw DimensionMismatch("chart: bad point length");
  const auto head = head_at(c, x);
  Vec u(x.size());
  std::copy(head.begin(), head.end(), u.begin());
  const auto tails = c.tail_axes();
  for (std::size_t t = 0; t < tails.size(); ++t) u[c.n + t] = x[tails[t]];
  return u;
}

std::optional<Vec> chart_inverse(const Chart& c, std::span<const double> u) {
  if (u.size() != c.x0.size()) throw DimensionMismatch("chart: bad point length");
  const auto tails = c.tail_axes();
  Vec x = c.x0;
  for (std::size_t t = 0; t < tails.size(); ++t) x[tails[t]] = u[c.n + t];
  const bool grid_model = c.model->kind() == "grid";
  if (grid_model) clamp_into(x, c.domain);

  Eigen::VectorXd f(c.n);
  for (int it = 0; it < c.newton.max_iter; ++it) {
    const auto head = head_at(c, x);
    double rmax = 0.0;
    for (int i = 0; i < c.n; ++i) {
      f(i) = head[i] - u[i];
      rmax = std::max(rmax, std::abs(f(i)));
    }
    if (rmax <= c.newton.tol) return x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(minor_jacobian(c, x));
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd delta = lu.solve(-f);
    for (int j = 0; j < c.n; ++j) x[c.domain_cols[j]] += delta(j);
    if (grid_model) clamp_into(x, c.domain);
  }
  return std::nullopt;
}

Vec chart_pi(const Chart& c, std::span<const double> target_point) {
  Vec out(static_cast<std::size_t>(c.n));
  for (int i = 0; i < c.n; ++i) {
    const auto r = static_cast<std::size_t>(c.image_rows[i]);
    if (r >= target_point.size()) throw DimensionMismatch("chart: bad target point length");
    out[i] = target_point[r];
  }
  return out;
}

Chart build_chart(const SampledMap& map, const Vec& x0, int n, const ChartOptions& opts) {
  const auto& grid = map.grid();
  const int k = grid.dim();
  if (static_cast<int>(x0.size()) != k) throw DimensionMismatch("chart: bad center length");
  if (!grid.box().contains(x0, 1e-12)) throw OutOfDomain("chart: center outside the domain");
  if (n < 1 || n > std::min(map.target_dim(), k))
    throw InvalidDims("chart: order must fit domain and target dimensions");
  if (!map.target().componentwise())
    throw NonComponentTarget("chart: coordinate target required");

  const auto sel = select_minor(approx_derivative(map, x0), n, opts.rank_tol);

  Chart c;
  c.x0 = x0;
  c.n = n;
  c.image_rows = sel.rows;
  c.domain_cols = sel.cols;
  c.domain = grid.box();
  c.newton = opts.newton;
  c.match_tol = opts.match_tol;
  c.model = map.smooth_model_at(x0);
  if (c.model->kind() == "grid") c.fd_step = 0.5 * grid.max_spacing();
  c.minor_det_at_center = minor_det_at(c, x0);
  if (std::abs(c.minor_det_at_center) < opts.rank_tol)
    throw NoFullRankMinor("chart: model minor is singular at the center");
  const double det_floor = 0.5 * std::abs(c.minor_det_at_center);

  std::vector<double> halfw(k);
  for (int a = 0; a < k; ++a)
    halfw[a] = 0.5 * std::min(x0[a] - grid.box().lo[a], grid.box().hi[a] - x0[a]);

  const double min_side = 4.0 * grid.max_spacing();
  for (;;) {
    double side = std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) side = std::min(side, 2.0 * halfw[a]);
    if (side < min_side)
      throw ChartShrunkToGrid("chart: certified box fell under four grid cells");

    Box box;
    box.lo.resize(k);
    box.hi.resize(k);
    for (int a = 0; a < k; ++a) {
      box.lo[a] = x0[a] - halfw[a];
      box.hi[a] = x0[a] + halfw[a];
    }

    auto probes = lattice_probes(x0, halfw);
    for (std::size_t f = 0; f < grid.count(); ++f) {
      const Vec node = grid.node(f);
      if (box.contains(node, 1e-12)) probes.push_back(node);
    }

    bool ok = true;
    for (const auto& p : probes) {
      if (std::abs(minor_det_at(c, p)) < det_floor) {
        ok = false;
        break;
      }
      const auto inv = chart_inverse(c, chart_forward(c, p));
      if (!inv) {
        ok = false;
        break;
      }
      double miss = 0.0;
      for (int a = 0; a < k; ++a) miss = std::max(miss, std::abs((*inv)[a] - p[a]));
      if (miss > c.match_tol) {
        ok = false;
        break;
      }
    }
    if (ok) {
      c.box = box;
      double lf = 0.0, li = 0.0;
      for (const auto& p : lattice_probes(x0, halfw)) {
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(full_jacobian(c, p));
        const auto& sv = svd.singularValues();
        lf = std::max(lf, sv(0));
        const double smin = sv(sv.size() - 1);
        li = std::max(li, smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity());
      }
      c.lip_forward = lf;
      c.lip_inverse = li;
      return c;
    }
    for (int a = 0; a < k; ++a) halfw[a] *= 0.5;
  }
}

NormalFormReport verify_normal_form(const Chart& c, const SampledMap& map, int grid_stride,
                                    double tau_K) {
  if (grid_stride < 1) throw InvalidSpec("chart verify: stride must be >= 1");
  const auto& grid = map.grid();
  const int k = grid.dim();
  const double h = grid.max_spacing();
  const double tau = tau_K > 0.0 ? tau_K : 10.0 * h;

  std::vector<std::size_t> keep;
  std::vector<int> mi(k);
  for (std::size_t f = 0; f < grid.count(); ++f) {
    grid.multi_index(f, mi);
    bool on_stride = true;
    for (int a = 0; a < k; ++a) on_stride = on_stride && mi[a] % grid_stride == 0;
    if (!on_stride) continue;
    if (c.box.contains(grid.node(f), 1e-12)) keep.push_back(f);
  }
  if (keep.empty()) throw EmptyField("chart verify: no grid nodes inside the box");

  std::vector<double> residual(keep.size(), 0.0);
  std::vector<char> failed(keep.size(), 0);
  parallel_for(keep.size(), [&](std::size_t i) {
    const Vec node = grid.node(keep[i]);
    const Vec u = chart_forward(c, node);
    const auto inv = chart_inverse(c, u);
    if (!inv) {
      failed[i] = 1;
      return;
    }
    Vec x = *inv;
    clamp_into(x, c.domain);
    Vec fx;
    try {
      fx = map.evaluate(x);
    } catch (const Error&) {
      failed[i] = 1;
      return;
    }
    double r = 0.0;
    for (int q = 0; q < c.n; ++q) r = std::max(r, std::abs(fx[c.image_rows[q]] - u[q]));
    residual[i] = r;
  });

  NormalFormReport rep;
  rep.tau_K = tau;
  rep.detected.tau_K = tau;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (failed[i]) {
      ++rep.newton_failures;
      continue;
    }
    ++rep.checked;
    rep.max_residual_all = std::max(rep.max_residual_all, residual[i]);
    if (residual[i] <= tau) {
      rep.detected.nodes.push_back(keep[i]);
      rep.detected.residuals.push_back(residual[i]);
      rep.max_residual_in_k = std::max(rep.max_residual_in_k, residual[i]);
    }
  }
  double cell = 1.0;
  for (int a = 0; a < k; ++a) cell *= grid_stride * grid.spacing(a);
  rep.detected.measure_fraction =
      static_cast<double>(rep.detected.nodes.size()) * cell / c.box.volume();
  return rep;
}

SliceComparisonReport check_404(const Chart& c, const SampledMap& map, const DetectedSet& set,
                                double slack) {
  const double pad =
      slack >= 0.0 ? slack : 10.0 * map.grid().max_spacing() * map.effective_lipschitz();
  SliceComparisonReport rep;

  std::map<Vec, std::vector<std::size_t>> slices;
  std::vector<Vec> heads(set.nodes.size());
  for (std::size_t i = 0; i < set.nodes.size(); ++i) {
    const Vec node = map.grid().node(set.nodes[i]);
    const Vec u = chart_forward(c, node);
    heads[i].assign(u.begin(), u.begin() + c.n);
    Vec tail(u.begin() + c.n, u.end());
    slices[std::move(tail)].push_back(i);
  }

  double worst = std::numeric_limits<double>::lowest();
  for (const auto& [tail, members] : slices) {
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const std::size_t p = members[a];
        const std::size_t q = members[b];
        double lhs = 0.0;
        for (int i = 0; i < c.n; ++i) lhs = std::max(lhs, std::abs(heads[p][i] - heads[q][i]));
        const double d =
            map.target().distance(map.node_image(set.nodes[p]), map.node_image(set.nodes[q]));
        const double margin = lhs - d - pad;
        ++rep.pairs;
        if (margin > 0.0) ++rep.violations;
        worst = std::max(worst, margin);
      }
  }
  rep.worst_margin = rep.pairs > 0 ? worst : 0.0;
  return rep;
}

PreimageReport check_preimage_vertical(const Chart& c, const SampledMap& map,
                                       const DetectedSet& set, double tol_img) {
  if (!(tol_img > 0.0)) throw InvalidSpec("preimage check: tolerance must be positive");
  PreimageReport rep;
  std::vector<Vec> heads(set.nodes.size());
  for (std::size_t i = 0; i < set.nodes.size(); ++i) {
    const Vec u = chart_forward(c, map.grid().node(set.nodes[i]));
    heads[i].assign(u.begin(), u.begin() + c.n);
  }
  double worst = std::numeric_limits<double>::lowest();
  for (std::size_t p = 0; p < set.nodes.size(); ++p)
    for (std::size_t q = p + 1; q < set.nodes.size(); ++q) {
      const double d =
          map.target().distance(map.node_image(set.nodes[p]), map.node_image(set.nodes[q]));
      if (d > tol_img) continue;
      ++rep.pairs_close;
      double lhs = 0.0;
      for (int i = 0; i < c.n; ++i) lhs = std::max(lhs, std::abs(heads[p][i] - heads[q][i]));
      if (lhs > tol_img) ++rep.violations;
      worst = std::max(worst, lhs - tol_img);
    }
  rep.worst_excess = rep.pairs_close > 0 ? worst : 0.0;
  return rep;
}

ContentEstimate check_image_positive(const SampledMap& map, const DetectedSet& set, int n) {
  if (set.nodes.empty()) throw EmptyInput("image content: empty detected set");
  const double rho = default_inflation(map);
  if (rho <= 0.0) {
    // constant samplings: a bare finite image has zero content at order >= 1
    ContentEstimate est;
    est.n = n;
    return est;
  }
  ContentOptions opts;
  opts.rho = rho;
  opts.cell = 2.0 * rho;
  return content_estimate(map.target(), image_points(map, set.nodes), n, opts);
}

void save_chart(const Chart& c, const std::string& path, const NormalFormReport* summary) {
  json j;
  j["x0"] = c.x0;
  j["n"] = c.n;
  j["image_rows"] = c.image_rows;
  j["domain_cols"] = c.domain_cols;
  j["box"] = {{"lo", c.box.lo}, {"hi", c.box.hi}};
  j["minor_det_at_center"] = c.minor_det_at_center;
  j["newton"] = {{"tol", c.newton.tol}, {"max_iter", c.newton.max_iter}};
  j["match_tol"] = c.match_tol;
  j["lipschitz"] = {{"forward", c.lip_forward}, {"inverse", c.lip_inverse}};
  j["model_kind"] = c.model ? c.model->kind() : "";
  if (summary) {
    j["residual_summary"] = {{"checked", summary->checked},
                             {"newton_failures", summary->newton_failures},
                             {"max_residual_in_k", summary->max_residual_in_k},
                             {"max_residual_all", summary->max_residual_all},
                             {"tau_k", summary->tau_K},
                             {"detected_nodes", summary->detected.nodes.size()},
                             {"measure_fraction", summary->detected.measure_fraction}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write chart: " + path);
  out << j.dump(2) << "\n";
}

Chart load_chart(const std::string& path, const SampledMap& map) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open chart: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("chart parse: " + std::string(e.what()));
  }
  Chart c;
  try {
    c.x0 = j.at("x0").get<Vec>();
    c.n = j.at("n").get<int>();
    c.image_rows = j.at("image_rows").get<std::vector<int>>();
    c.domain_cols = j.at("domain_cols").get<std::vector<int>>();
    c.box.lo = j.at("box").at("lo").get<Vec>();
    c.box.hi = j.at("box").at("hi").get<Vec>();
    c.minor_det_at_center = j.at("minor_det_at_center").get<double>();
    c.newton.tol = j.at("newton").at("tol").get<double>();
    c.newton.max_iter = j.at("newton").at("max_iter").get<int>();
    c.match_tol = j.at("match_tol").get<double>();
    c.lip_forward = j.at("lipschitz").at("forward").get<double>();
    c.lip_inverse = j.at("lipschitz").at("inverse").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("chart fields: " + std::string(e.what()));
  }
  if (c.n < 1 || static_cast<int>(c.image_rows.size()) != c.n ||
      static_cast<int>(c.domain_cols.size()) != c.n)
    throw ConfigError("chart: inconsistent order and permutations");
  if (c.x0.size() != map.grid().box().lo.size())
    throw ConfigError("chart: center dimension does not match the map");
  if (c.box.lo.size() != c.x0.size() || c.box.hi.size() != c.x0.size())
    throw ConfigError("chart: box dimension does not match the center");
  for (int r : c.image_rows)
    if (r < 0 || r >= map.target_dim()) throw ConfigError("chart: image row out of range");
  for (int a : c.domain_cols)
    if (a < 0 || a >= map.domain_dim()) throw ConfigError("chart: domain axis out of range");
  c.domain = map.grid().box();
  c.model = map.smooth_model_at(c.x0);
  if (c.model->kind() == "grid") c.fd_step = 0.5 * map.grid().max_spacing();
  return c;
}

}  // namespace mgt
