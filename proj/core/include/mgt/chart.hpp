#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgt/content.hpp"
#include "mgt/geometry.hpp"
#include "mgt/jacobian.hpp"
#include "mgt/sampled_map.hpp"

namespace mgt {

struct MinorSelection {
  std::vector<int> rows;  // target components, ascending
  std::vector<int> cols;  // domain axes, ascending
  double det = 0.0;
};

// Largest-|det| n x n minor of the derivative: exhaustive when the search
// space is small, greedy complete pivoting otherwise. Ties break toward the
// lexicographically smallest index sets. Throws NoFullRankMinor when the best
// determinant falls under rank_tol * sigma_max^n.
MinorSelection select_minor(const DerivativeSample& d, int n, double rank_tol = 1e-6);

struct NewtonParams {
  double tol = 1e-10;
  int max_iter = 50;
};

struct ChartOptions {
  NewtonParams newton{};
  double rank_tol = 1e-6;
  // Newton round-trips must land back on the probe within this distance.
  double match_tol = 1e-6;
};

// Normal-form coordinates u = G(x): the selected target components first, the
// untouched domain axes after them. G is backed by the smooth local model at
// x0, so for piecewise rules it extends the branch through x0 past creases;
// the residual checks against the real map expose where that extension stops
// matching.
struct Chart {
  Vec x0;
  int n = 0;
  std::vector<int> image_rows;
  std::vector<int> domain_cols;
  Box box;     // certified neighborhood of x0
  Box domain;  // evaluation bounds for grid-backed models
  double minor_det_at_center = 0.0;
  NewtonParams newton{};
  double match_tol = 1e-6;
  double fd_step = 1e-5;  // differencing step for non-affine models
  double lip_forward = 0.0;  // max spectral norm of dG over probes
  double lip_inverse = 0.0;  // max 1/sigma_min(dG) over probes
  std::shared_ptr<const MapRule> model;

  std::vector<int> tail_axes() const;
};

// Box starts at half the distance from x0 to the domain boundary and halves
// until Newton inversion round-trips from every probe (3^k lattice plus the
// grid nodes inside) and the minor determinant stays above half its center
// value. Throws ChartShrunkToGrid once the side falls under 4h.
Chart build_chart(const SampledMap& map, const Vec& x0, int n, const ChartOptions& opts = {});

Vec chart_forward(const Chart& c, std::span<const double> x);
// Newton from the chart center; nullopt when it fails to converge.
std::optional<Vec> chart_inverse(const Chart& c, std::span<const double> u);
// The selected target components: 1-Lipschitz into l^inf, sqrt(n) into l^2.
Vec chart_pi(const Chart& c, std::span<const double> target_point);

struct DetectedSet {
  std::vector<std::size_t> nodes;  // grid flats inside the box passing tau_K
  std::vector<double> residuals;   // same order
  double tau_K = 0.0;
  double measure_fraction = 0.0;  // |K| * (stride h)^k / |box|
};

struct NormalFormReport {
  DetectedSet detected;
  std::size_t checked = 0;
  std::size_t newton_failures = 0;
  double max_residual_in_k = 0.0;
  double max_residual_all = 0.0;
  double tau_K = 0.0;
};

// Residual r = max_i |f(G^-1(u))_rows[i] - u_i| over strided grid nodes in
// the box; nodes with r <= tau_K form the detected set. tau_K <= 0 picks the
// default 10 h.
NormalFormReport verify_normal_form(const Chart& c, const SampledMap& map, int grid_stride = 1,
                                    double tau_K = -1.0);

struct SliceComparisonReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // max over pairs of lhs - rhs; <= 0 when clean
};

// Pairs of detected nodes sharing a tail slice must satisfy
// |u_head(p) - u_head(q)|_inf <= d(f(p), f(q)) + slack. slack <= 0 picks the
// default 10 h L.
SliceComparisonReport check_404(const Chart& c, const SampledMap& map, const DetectedSet& k,
                                double slack = -1.0);

struct PreimageReport {
  std::size_t pairs_close = 0;  // image distance <= tol_img
  std::size_t violations = 0;
  double worst_excess = 0.0;  // max |u_head(p) - u_head(q)|_inf - tol_img over close pairs
};

// Nodes whose images collide (within tol_img) must share their head
// coordinates: preimages of a point meet the detected set in one vertical
// slice.
PreimageReport check_preimage_vertical(const Chart& c, const SampledMap& map,
                                       const DetectedSet& k, double tol_img);

// Content of the image of the detected set at order n.
ContentEstimate check_image_positive(const SampledMap& map, const DetectedSet& k, int n);

void save_chart(const Chart& c, const std::string& path,
                const NormalFormReport* summary = nullptr);
// The model is rebuilt from the map at the stored center, so the manifest the
// chart was built from must be supplied again.
Chart load_chart(const std::string& path, const SampledMap& map);

}  // namespace mgt
