#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mgt/sampled_map.hpp"

namespace mgt {

struct PolyTerm {
  double coef = 0.0;
  std::vector<int> powers;  // one exponent per domain axis
};

// Named test maps with analytic structure (closed forms, Lipschitz hints,
// crease sets) used throughout the tooling.
SampledMap make_projection_map(int domain_dim, int n, Box box, std::vector<int> grid);
SampledMap make_linear_map(const std::vector<std::vector<double>>& matrix, Box box,
                           std::vector<int> grid);
SampledMap make_affine_map(const std::vector<std::vector<double>>& matrix, const Vec& offset,
                           Box box, std::vector<int> grid);
SampledMap make_poly_map(const std::vector<std::vector<PolyTerm>>& components, Box box,
                         std::vector<int> grid, std::optional<double> lip_hint = std::nullopt);
SampledMap make_constant_map(const Vec& value, Box box, std::vector<int> grid);
// Iterated reflection map on [0,1]^2 followed by projection to the first
// coordinate; image is [0, 2^-N].
SampledMap make_fold_map(int stages, std::vector<int> grid);
// Post-composes a map with the landmark embedding of its own image; target
// becomes sup_norm(#landmarks). Pairwise distances are preserved up to the
// landmark density, so content estimates are unchanged for exact landmarks.
SampledMap make_kuratowski_image_map(const SampledMap& base, int landmark_stride);

// Full manifest dispatch ("projection", "linear", "poly", "constant", "fold",
// "kuratowski_image", "grid"); relative CSV paths resolve against base_dir.
SampledMap make_map_json(const std::string& json_text, const std::string& base_dir = ".");
std::vector<std::string> gallery_kinds();

// One reflection stage: maps [0, 2^-(n-1)]^2 onto [0, 2^-n]^2 by folding the
// right and upper halves over the lower-left square.
std::array<double, 2> fold_stage(int n, double x, double y);
// Composition of stages 1..N before the final projection.
std::array<double, 2> fold_pre_projection(int stages, double x, double y);

// Area bound for the bi-Lipschitz set of the fold construction.
double fold_K_bound(double lambda, int stages);

// Measure of the largest grid subset (greedy, left-to-right) of the
// horizontal slice at height y on which the map is lambda-bi-Lipschitz.
// Reported as the length of the filled-in accepted set: a grid cell counts
// when both endpoints survive, so the value is exact on monotone branches.
double fold_slice_capacity(const SampledMap& map, double lambda, double y);

// Upper bound for the fiber-measure integral of a Lipschitz map:
// lip^m * (w_{n-m} w_m / w_n) * measure, with w_j the unit ball volumes.
double coarea_rhs(int n, int m, double lip, double measure);

}  // namespace mgt
