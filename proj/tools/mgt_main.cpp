// Command line front end for the mgt library: map inspection, density and
// jacobian fields, dyadic partitions, chart certification, and the
// acceptance suite. All numeric output goes through the same shortest
// round-trip formatting the library uses, so rerunning a verb on the same
// inputs prints identical bytes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgt/chart.hpp"
#include "mgt/config.hpp"
#include "mgt/content.hpp"
#include "mgt/csv.hpp"
#include "mgt/density.hpp"
#include "mgt/errors.hpp"
#include "mgt/gallery.hpp"
#include "mgt/jacobian.hpp"
#include "mgt/parallel.hpp"
#include "mgt/partition.hpp"
#include "mgt/report.hpp"
#include "mgt/suite.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kNamedMaps =
    "projection, plane, line, sum, square, constant, fold<N> (e.g. fold3)";

mgt::Box unit_square() { return mgt::Box{{0.0, 0.0}, {1.0, 1.0}}; }

// Named gallery shortcuts, or a manifest path for anything else.
mgt::SampledMap resolve_map(const std::string& ref) {
  if (ref.ends_with(".json") || ref.find('/') != std::string::npos) {
    return mgt::load_map_manifest(ref);
  }
  if (ref == "projection") return mgt::make_projection_map(2, 1, unit_square(), {129, 129});
  if (ref == "plane") return mgt::make_projection_map(2, 2, unit_square(), {129, 129});
  if (ref == "line") return mgt::make_projection_map(1, 1, mgt::Box{{0.0}, {1.0}}, {129});
  if (ref == "sum") return mgt::make_linear_map({{1.0, 1.0}}, unit_square(), {129, 129});
  if (ref == "square") {
    return mgt::make_poly_map({{mgt::PolyTerm{1.0, {2, 0}}}}, mgt::Box{{0.5, 0.0}, {1.5, 1.0}},
                              {33, 33}, 3.0);
  }
  if (ref == "constant") return mgt::make_constant_map({0.3}, unit_square(), {33, 33});
  if (ref.rfind("fold", 0) == 0) {
    const std::string tail = ref.substr(4);
    try {
      const int stages = std::stoi(tail);
      return mgt::make_fold_map(stages, {257, 257});
    } catch (const std::exception&) {
      throw mgt::InvalidSpec("unknown fold map '" + ref + "'");
    }
  }
  throw mgt::InvalidSpec("unknown map '" + ref + "'; named maps: " + kNamedMaps);
}

mgt::Vec parse_point(const std::string& text) {
  mgt::Vec x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    x.push_back(mgt::csv_number(item, "point coordinate"));
  }
  if (x.empty()) throw mgt::InvalidSpec("empty point '" + text + "'");
  return x;
}

mgt::LadderSpec make_ladder(const mgt::ExperimentConfig& cfg, const std::vector<double>& radii_h,
                            double pitch) {
  mgt::LadderSpec s;
  s.count = cfg.ladder_count;
  s.factor = cfg.ladder_factor;
  s.top = cfg.ladder_top;
  const auto& rungs = radii_h.empty() ? cfg.radii_h : radii_h;
  for (double r : rungs) s.radii.push_back(r * pitch);
  return s;
}

mgt::DensityShape parse_shape(const std::string& name) {
  if (name == "ball") return mgt::DensityShape::Ball;
  if (name == "cube") return mgt::DensityShape::Cube;
  throw mgt::InvalidSpec("shape must be ball or cube, got '" + name + "'");
}

// Environment beats the flag, the flag beats the config file.
void apply_threads(int flag_threads, int cfg_threads) {
  int requested = 0;
  if (std::getenv("MGT_THREADS") == nullptr) {
    requested = flag_threads > 0 ? flag_threads : cfg_threads;
  }
  mgt::set_default_thread_count(mgt::resolve_thread_count(requested));
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw mgt::Error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << "\n";
}

std::string fd(double v) { return mgt::format_double(v); }

json content_json(const mgt::ContentEstimate& est) {
  return json{{"n", est.n},
              {"method", mgt::content_method_name(est.method)},
              {"lower", est.lower},
              {"upper", est.upper},
              {"rho", est.rho},
              {"cell", est.cell},
              {"clusters", est.clusters.size()}};
}

int run_content(const mgt::ExperimentConfig& cfg, const std::string& map_ref, int n, double rho,
                double cell, const std::string& dispatch, const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  mgt::ContentOptions opts;
  opts.rho = rho >= 0.0 ? rho : mgt::default_inflation(map);
  if (cell > 0.0) opts.cell = cell;
  if (dispatch == "cluster") {
    opts.dispatch = mgt::ContentDispatch::Cluster;
  } else if (dispatch == "pixel") {
    opts.dispatch = mgt::ContentDispatch::Pixel;
  } else if (dispatch != "auto") {
    throw mgt::InvalidSpec("dispatch must be auto, cluster or pixel");
  }
  const int order = n > 0 ? n : cfg.n;
  const auto est = mgt::content_estimate(map.target(), mgt::image_points(map), order, opts);
  std::cout << "map " << map_ref << ": " << map.grid().count() << " samples\n";
  std::cout << "content order " << order << " method " << mgt::content_method_name(est.method)
            << ": upper " << fd(est.upper) << ", lower " << fd(est.lower) << " (rho "
            << fd(est.rho) << ", cell " << fd(est.cell) << ")\n";
  if (!out_dir.empty()) {
    write_text(ensure_dir(out_dir) / "content.json", content_json(est).dump(2) + "\n");
  }
  return 0;
}

int run_density(const mgt::ExperimentConfig& cfg, const std::string& map_ref, int stride, int n,
                const std::vector<double>& radii_h, const std::string& shape,
                const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const auto ladder = make_ladder(cfg, radii_h, map.grid().max_spacing());
  const int order = n > 0 ? n : cfg.n;
  const int step = stride > 0 ? stride : cfg.stride;
  const auto field = mgt::density_field(map, step, order, ladder,
                                        parse_shape(shape.empty() ? cfg.shape : shape));
  double lo = field.front().theta_lower_hat, hi = field.front().theta_upper_hat;
  double mean = 0.0;
  for (const auto& p : field) {
    lo = std::min(lo, p.theta_lower_hat);
    hi = std::max(hi, p.theta_upper_hat);
    mean += p.theta_lower_hat;
  }
  mean /= static_cast<double>(field.size());
  std::cout << "field of " << field.size() << " points (stride " << step << ")\n";
  std::cout << "theta_lower: min " << fd(lo) << ", mean " << fd(mean) << "; theta_upper max "
            << fd(hi) << "\n";
  if (!out_dir.empty()) {
    write_text(ensure_dir(out_dir) / "density.csv", mgt::density_field_csv(field));
  }
  return 0;
}

int run_jacobian(const mgt::ExperimentConfig& cfg, const std::string& map_ref,
                 const std::string& at, int n, double h_fd, const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const auto x = parse_point(at);
  const auto d = mgt::approx_derivative(map, x, h_fd);
  const int order = n > 0 ? n : cfg.n;
  std::cout << "derivative at " << at << " (" << d.rows << "x" << d.cols << ", h_fd "
            << fd(d.h_fd) << ")\n";
  for (int i = 0; i < d.rows; ++i) {
    std::cout << "  [";
    for (int a = 0; a < d.cols; ++a) std::cout << (a ? ", " : "") << fd(d.entry(i, a));
    std::cout << "]\n";
  }
  std::cout << "singular values:";
  for (double s : d.singular_values) std::cout << " " << fd(s);
  std::cout << "\nrank " << d.rank_estimate;
  if (d.rows >= order) {
    mgt::DerivativeSample head = d;
    if (d.rows > order) {
      // restrict to the first `order` components for the volume jacobian
      head.matrix.assign(d.matrix.begin(),
                         d.matrix.begin() + static_cast<std::ptrdiff_t>(order) * d.cols);
      head.rows = order;
      head.singular_values.clear();
    }
    std::cout << ", |J^" << order << "f| " << fd(mgt::jacobian_n(head, order));
  }
  std::cout << "\n";
  if (!out_dir.empty()) {
    json j{{"x", x},           {"matrix", d.matrix},          {"rows", d.rows},
           {"cols", d.cols},   {"h_fd", d.h_fd},              {"singular_values",
                                                               d.singular_values},
           {"rank", d.rank_estimate}};
    write_text(ensure_dir(out_dir) / "jacobian.json", j.dump(2) + "\n");
  }
  return 0;
}

int run_prop52(const mgt::ExperimentConfig& cfg, const std::string& map_ref, int stride,
               const std::vector<double>& radii_h, double tol, const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const auto ladder = make_ladder(cfg, radii_h, map.grid().max_spacing());
  const int step = stride > 0 ? stride : cfg.stride;
  const double gap_tol = tol > 0.0 ? tol : cfg.gap_tol;
  const auto rep = mgt::check_density_equals_jacobian(map, step, ladder, gap_tol);
  std::cout << "density vs jacobian on " << rep.points.size() << " points (" << rep.skipped
            << " skipped)\n";
  std::cout << "pass fraction " << fd(rep.pass_fraction) << " at tolerance " << fd(gap_tol)
            << "; max gap " << fd(rep.max_gap) << "\n";
  if (!out_dir.empty()) {
    json j{{"points", rep.points.size()},
           {"skipped", rep.skipped},
           {"pass_fraction", rep.pass_fraction},
           {"max_gap", rep.max_gap},
           {"tolerance", rep.tolerance}};
    write_text(ensure_dir(out_dir) / "prop52.json", j.dump(2) + "\n");
  }
  return rep.pass_fraction >= cfg.pass_fraction ? 0 : 1;
}

json partition_json(const mgt::PartitionResult& res) {
  json cubes = json::array();
  for (const auto& c : res.per_cube) {
    cubes.push_back({{"address", c.address},
                     {"side", c.side},
                     {"content", c.content_upper},
                     {"term", c.term}});
  }
  return json{{"n", res.n},
              {"m", res.m},
              {"depth_max", res.depth_max},
              {"value", res.value},
              {"cut_set", res.cut_set},
              {"cubes", cubes}};
}

int run_nm_content(const mgt::ExperimentConfig& cfg, const std::string& map_ref, int n, int m,
                   int depth, bool enumerate, const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const int nn = n > 0 ? n : cfg.n;
  const int mm = m >= 0 ? m : cfg.m;
  const int dd = depth >= 0 ? depth : cfg.depth;
  const auto res = enumerate ? mgt::nm_content_enumerate(map, nn, mm, dd)
                             : mgt::nm_content_dyadic(map, nn, mm, dd);
  std::cout << "(" << nn << "," << mm << ")-content to depth " << dd << ": " << fd(res.value)
            << " over " << res.cut_set.size() << " cubes"
            << (enumerate ? " (exhaustive)" : "") << "\n";
  if (!out_dir.empty()) {
    const auto dir = ensure_dir(out_dir);
    write_text(dir / "partition.json", partition_json(res).dump(2) + "\n");
    write_text(dir / "partition.csv", mgt::partition_csv(res));
  }
  return 0;
}

int run_prop51(const mgt::ExperimentConfig& cfg, const std::string& map_ref, int n, int m,
               int depth, int stride, const std::vector<double>& radii_h,
               const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const auto ladder = make_ladder(cfg, radii_h, map.grid().max_spacing());
  const int nn = n > 0 ? n : cfg.n;
  const int mm = m >= 0 ? m : cfg.m;
  const int dd = depth >= 0 ? depth : cfg.depth;
  const int step = stride > 0 ? stride : cfg.stride;
  const auto rep = mgt::check_prop51(map, nn, mm, dd, ladder, step);
  const bool holds = rep.lhs <= rep.rhs_density * cfg.slack_factor;
  std::cout << "partition value " << fd(rep.lhs) << " vs density bound " << fd(rep.rhs_density)
            << " (slack " << fd(rep.slack) << "): " << (holds ? "holds" : "violated") << "\n";
  if (rep.jacobian_variant) {
    std::cout << "jacobian variant bound " << fd(rep.rhs_jacobian) << ": "
              << (rep.holds_jacobian ? "holds" : "violated") << "\n";
  }
  if (!out_dir.empty()) {
    json j{{"lhs", rep.lhs},
           {"rhs_density", rep.rhs_density},
           {"slack", rep.slack},
           {"holds", holds},
           {"jacobian_variant", rep.jacobian_variant},
           {"rhs_jacobian", rep.rhs_jacobian},
           {"partition", partition_json(rep.partition)}};
    write_text(ensure_dir(out_dir) / "prop51.json", j.dump(2) + "\n");
  }
  return holds ? 0 : 1;
}

int run_chart(const mgt::ExperimentConfig& cfg, const std::string& map_ref,
              const std::string& center, int n, int stride, const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  mgt::ChartOptions opts;
  opts.rank_tol = cfg.rank_tol;
  opts.match_tol = cfg.match_tol;
  const int order = n > 0 ? n : cfg.n;
  const auto chart = mgt::build_chart(map, parse_point(center), order, opts);
  const auto rep = mgt::verify_normal_form(chart, map, stride > 0 ? stride : 1, cfg.tau_k);
  std::cout << "chart at " << center << ", order " << order << ", minor det "
            << fd(chart.minor_det_at_center) << "\n";
  std::cout << "box:";
  for (int a = 0; a < static_cast<int>(chart.box.lo.size()); ++a) {
    std::cout << " [" << fd(chart.box.lo[a]) << ", " << fd(chart.box.hi[a]) << "]";
  }
  std::cout << "\ncertified " << rep.detected.nodes.size() << " of " << rep.checked
            << " nodes (fraction " << fd(rep.detected.measure_fraction) << ", tau "
            << fd(rep.tau_K) << ")\n";
  std::cout << "max residual " << fd(rep.max_residual_all) << " overall, "
            << fd(rep.max_residual_in_k) << " on the certified set\n";
  if (!out_dir.empty()) {
    mgt::save_chart(chart, (ensure_dir(out_dir) / "chart.json").string(), &rep);
    std::cout << "wrote " << (fs::path(out_dir) / "chart.json").string() << "\n";
  }
  return 0;
}

int run_chart_verify(const mgt::ExperimentConfig& cfg, const std::string& map_ref,
                     const std::string& chart_path, int stride, double tol_img,
                     const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const auto chart = mgt::load_chart(chart_path, map);
  const int step = stride > 0 ? stride : 4;
  const auto rep = mgt::verify_normal_form(chart, map, step, cfg.tau_k);
  const auto slices = mgt::check_404(chart, map, rep.detected);
  const auto vertical = mgt::check_preimage_vertical(chart, map, rep.detected, tol_img);
  std::cout << "certified " << rep.detected.nodes.size() << " of " << rep.checked
            << " nodes; max residual " << fd(rep.max_residual_in_k) << "\n";
  std::cout << "slice comparisons: " << slices.pairs << " pairs, " << slices.violations
            << " violations (worst margin " << fd(slices.worst_margin) << ")\n";
  std::cout << "preimage verticality: " << vertical.pairs_close << " close pairs, "
            << vertical.violations << " violations\n";
  if (!out_dir.empty()) {
    json j{{"checked", rep.checked},
           {"certified", rep.detected.nodes.size()},
           {"measure_fraction", rep.detected.measure_fraction},
           {"max_residual_in_k", rep.max_residual_in_k},
           {"newton_failures", rep.newton_failures},
           {"slice_pairs", slices.pairs},
           {"slice_violations", slices.violations},
           {"worst_margin", slices.worst_margin},
           {"preimage_pairs", vertical.pairs_close},
           {"preimage_violations", vertical.violations},
           {"worst_excess", vertical.worst_excess}};
    write_text(ensure_dir(out_dir) / "chart_verify.json", j.dump(2) + "\n");
  }
  return slices.violations == 0 && vertical.violations == 0 ? 0 : 1;
}

int run_gallery(const std::string& emit, int stages, int grid_cells, std::string out_path) {
  if (emit.empty()) {
    std::cout << "manifest kinds:";
    for (const auto& k : mgt::gallery_kinds()) std::cout << " " << k;
    std::cout << "\nnamed maps: " << kNamedMaps << "\n";
    return 0;
  }
  const int nodes = grid_cells + 1;
  std::optional<mgt::SampledMap> map;
  if (emit == "fold") {
    map = mgt::make_fold_map(stages, {nodes, nodes});
  } else if (emit == "projection") {
    map = mgt::make_projection_map(2, 1, unit_square(), {nodes, nodes});
  } else if (emit == "sum") {
    map = mgt::make_linear_map({{1.0, 1.0}}, unit_square(), {nodes, nodes});
  } else if (emit == "square") {
    map = mgt::make_poly_map({{mgt::PolyTerm{1.0, {2, 0}}}}, mgt::Box{{0.5, 0.0}, {1.5, 1.0}},
                             {nodes, nodes}, 3.0);
  } else if (emit == "constant") {
    map = mgt::make_constant_map({0.3}, unit_square(), {nodes, nodes});
  } else {
    throw mgt::InvalidSpec("gallery --emit supports projection, sum, square, constant, fold");
  }
  if (out_path.empty()) out_path = emit + ".json";
  if (!out_path.ends_with(".json")) {
    out_path = (ensure_dir(out_path) / (emit + ".json")).string();
  }
  mgt::save_map_manifest(*map, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_verify(const mgt::ExperimentConfig& cfg, const std::string& out_dir) {
  const auto rep = mgt::run_suite(cfg);
  for (const auto& row : rep.rows) {
    std::cout << row.id;
    for (std::size_t pad = row.id.size(); pad < 28; ++pad) std::cout << ' ';
    std::cout << " " << mgt::check_status_name(row.status);
    if (row.status != mgt::CheckStatus::Skip) {
      std::cout << "  measured " << fd(row.measured) << "  bound " << fd(row.bound)
                << "  slack " << fd(row.slack);
    }
    if (!row.note.empty()) std::cout << "  (" << row.note << ")";
    std::cout << "\n";
  }
  const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
  mgt::save_report(rep, dir);
  std::cout << "report: " << (fs::path(dir) / "report.json").string() << " and report.csv\n";
  std::cout << (rep.all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
  return rep.all_pass() ? 0 : 1;
}

int run_emit(const mgt::ExperimentConfig& cfg, const std::string& kind,
             const std::string& map_ref, const std::string& at, int stride, int n, int m,
             int depth, const std::vector<double>& radii_h, const std::string& out_dir) {
  const auto map = resolve_map(map_ref);
  const auto dir = ensure_dir(out_dir.empty() ? cfg.out_dir : out_dir);
  const int order = n > 0 ? n : cfg.n;
  if (kind == "density") {
    const auto ladder = make_ladder(cfg, radii_h, map.grid().max_spacing());
    const auto field = mgt::density_field(map, stride > 0 ? stride : cfg.stride, order, ladder,
                                          parse_shape(cfg.shape));
    write_text(dir / "density.csv", mgt::density_field_csv(field));
  } else if (kind == "ladder") {
    if (at.empty()) throw mgt::InvalidSpec("emit --kind ladder needs --at");
    const auto ladder = make_ladder(cfg, radii_h, map.grid().max_spacing());
    const auto profile = mgt::density_profile(map, parse_point(at), order, ladder,
                                              parse_shape(cfg.shape));
    write_text(dir / "ladder.csv", mgt::ladder_csv(profile));
  } else if (kind == "partition") {
    const auto res = mgt::nm_content_dyadic(map, order, m >= 0 ? m : cfg.m,
                                            depth >= 0 ? depth : cfg.depth);
    write_text(dir / "partition.csv", mgt::partition_csv(res));
  } else {
    throw mgt::InvalidSpec("emit --kind must be density, ladder or partition");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for contents, densities and chart certification"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "TOML config (or its .json mirror)");
  app.add_option("--threads", threads, "worker threads (MGT_THREADS overrides)");
  app.add_option("--out", out_dir, "output directory");

  std::string map_ref, at, center, dispatch = "auto", shape, chart_path, emit_kind,
              gallery_emit;
  std::vector<double> radii_h;
  int n = 0, m = -1, depth = -1, stride = 0, stages = 3, grid_cells = 128;
  double rho = -1.0, cell = -1.0, tol = 0.0, tol_img = 1e-6, h_fd = 0.0;
  bool enumerate = false;

  // global flags may appear after the verb: mgt verify --out results/
  auto verb = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  auto add_map = [&](CLI::App* sub) {
    sub->add_option("--map", map_ref, std::string("named map (") + kNamedMaps +
                                          ") or manifest path");
  };

  auto* c_content = verb("content", "content estimate of a sampled image");
  add_map(c_content);
  c_content->add_option("--n", n, "content order");
  c_content->add_option("--rho", rho, "inflation radius (default: L h / 2)");
  c_content->add_option("--cell", cell, "pixel pitch (default: 2 rho)");
  c_content->add_option("--dispatch", dispatch, "auto | cluster | pixel");

  auto* c_density = verb("density", "density ratio field");
  add_map(c_density);
  c_density->add_option("--stride", stride, "grid stride");
  c_density->add_option("--n", n, "density order");
  c_density->add_option("--radii-h", radii_h, "ladder radii in grid-pitch units")
      ->delimiter(',');
  c_density->add_option("--shape", shape, "ball | cube");

  auto* c_jac = verb("jacobian", "finite-difference derivative at a point");
  add_map(c_jac);
  c_jac->add_option("--at", at, "point, comma-separated")->required();
  c_jac->add_option("--n", n, "jacobian order");
  c_jac->add_option("--step", h_fd, "difference step (default: rule-dependent)");

  auto* c_p52 = verb("verify-prop52", "density against the jacobian field");
  add_map(c_p52);
  c_p52->add_option("--stride", stride, "grid stride");
  c_p52->add_option("--radii-h", radii_h, "ladder radii in grid-pitch units")->delimiter(',');
  c_p52->add_option("--tol", tol, "relative gap tolerance");

  auto* c_nm = verb("nm-content", "dyadic (n,m)-content partition");
  add_map(c_nm);
  c_nm->add_option("--n", n, "content order");
  c_nm->add_option("--m", m, "side-weight exponent");
  c_nm->add_option("--depth", depth, "maximum subdivision depth");
  c_nm->add_flag("--enumerate", enumerate, "exhaustive cut-set search (depth <= 3)");

  auto* c_p51 = verb("verify-prop51", "partition value against the density bound");
  add_map(c_p51);
  c_p51->add_option("--n", n, "content order");
  c_p51->add_option("--m", m, "side-weight exponent");
  c_p51->add_option("--depth", depth, "maximum subdivision depth");
  c_p51->add_option("--stride", stride, "density field stride");
  c_p51->add_option("--radii-h", radii_h, "ladder radii in grid-pitch units")->delimiter(',');

  auto* c_chart = verb("chart", "build and certify a normal-form chart");
  add_map(c_chart);
  c_chart->add_option("--center", center, "chart center, comma-separated")->required();
  c_chart->add_option("--n", n, "chart order");
  c_chart->add_option("--stride", stride, "verification stride (default 1)");

  auto* c_cv = verb("chart-verify", "re-verify a saved chart against a map");
  add_map(c_cv);
  c_cv->add_option("--chart", chart_path, "chart json path")->required();
  c_cv->add_option("--stride", stride, "verification stride (default 4)");
  c_cv->add_option("--tol-img", tol_img, "image distance tolerance for verticality");

  auto* c_gal = verb("gallery", "list named maps or emit a manifest");
  c_gal->add_option("--emit", gallery_emit, "projection | sum | square | constant | fold");
  c_gal->add_option("--N", stages, "fold stages");
  c_gal->add_option("--grid", grid_cells, "cells per axis (nodes = cells + 1)");

  auto* c_verify = verb("verify", "run the acceptance suite");

  auto* c_emit = verb("emit", "plot-data CSV for a sibling module");
  c_emit->add_option("--kind", emit_kind, "density | ladder | partition")->required();
  add_map(c_emit);
  c_emit->add_option("--at", at, "point for --kind ladder");
  c_emit->add_option("--stride", stride, "grid stride");
  c_emit->add_option("--n", n, "order");
  c_emit->add_option("--m", m, "side-weight exponent");
  c_emit->add_option("--depth", depth, "maximum subdivision depth");
  c_emit->add_option("--radii-h", radii_h, "ladder radii in grid-pitch units")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const mgt::ExperimentConfig cfg =
        config_path.empty() ? mgt::default_config() : mgt::load_config(config_path);
    apply_threads(threads, cfg.threads);
    if (map_ref.empty()) map_ref = cfg.map;

    if (*c_content) return run_content(cfg, map_ref, n, rho, cell, dispatch, out_dir);
    if (*c_density) return run_density(cfg, map_ref, stride, n, radii_h, shape, out_dir);
    if (*c_jac) return run_jacobian(cfg, map_ref, at, n, h_fd, out_dir);
    if (*c_p52) return run_prop52(cfg, map_ref, stride, radii_h, tol, out_dir);
    if (*c_nm) return run_nm_content(cfg, map_ref, n, m, depth, enumerate, out_dir);
    if (*c_p51) return run_prop51(cfg, map_ref, n, m, depth, stride, radii_h, out_dir);
    if (*c_chart) return run_chart(cfg, map_ref, center, n, stride, out_dir);
    if (*c_cv) return run_chart_verify(cfg, map_ref, chart_path, stride, tol_img, out_dir);
    if (*c_gal) return run_gallery(gallery_emit, stages, grid_cells, out_dir);
    if (*c_verify) return run_verify(cfg, out_dir);
    if (*c_emit) {
      return run_emit(cfg, emit_kind, map_ref, at, stride, n, m, depth, radii_h, out_dir);
    }
  } catch (const mgt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
