#pragma once

#include <string>
#include <vector>

#include "mgt/metric_space.hpp"
#include "mgt/sampled_map.hpp"

namespace mgt {

enum class ContentMethod { Oracle, Greedy, Pixel };

// Bracketed estimate of the n-content of a finite sample. Cluster methods
// report the cluster-cover value, an upper bound for the content of the
// rho-inflated sample; the true content of the bare finite set is 0, so
// lower stays 0 there. The pixel method is two-sided for its pixelization.
struct ContentEstimate {
  int n = 1;
  double lower = 0.0;
  double upper = 0.0;
  ContentMethod method = ContentMethod::Greedy;
  double rho = 0.0;   // inflation radius used by cluster methods
  double cell = 0.0;  // pitch used by the pixel method
  std::vector<std::vector<int>> clusters;  // cover witness, cluster methods
  std::vector<double> cluster_diam;
};

std::string content_method_name(ContentMethod m);

// Minimum over all set partitions of sum (w_n/2^n)(diam + 2 rho)^n. Exact by
// Bell-number enumeration with partial-sum pruning.
ContentEstimate content_oracle_exact(const MetricSpace& space, const std::vector<Vec>& points,
                                     double rho, int n);

// Agglomerative heuristic for the same objective: merge while the total
// drops, lexicographic tie-break on cluster positions. Never below the
// oracle value.
ContentEstimate content_greedy(const MetricSpace& space, const std::vector<Vec>& points,
                               double rho, int n);

// Occupied origin-anchored cells at the given pitch, times cell^n. Points
// must be coordinate vectors of length n.
ContentEstimate content_pixel_euclidean(const std::vector<Vec>& points, int n, double cell);

enum class ContentDispatch { Auto, Cluster, Pixel };

struct ContentOptions {
  double rho = 0.0;
  double cell = 0.0;  // <= 0: derives 2*rho
  int oracle_cap = 12;
  ContentDispatch dispatch = ContentDispatch::Auto;
};

// Auto picks pixel for euclidean(n) targets, else the cluster path (oracle
// up to oracle_cap points, greedy beyond).
ContentEstimate content_estimate(const MetricSpace& target, const std::vector<Vec>& points,
                                 int n, const ContentOptions& opts);

// Node images of a map, as points for content_estimate.
std::vector<Vec> image_points(const SampledMap& map);
std::vector<Vec> image_points(const SampledMap& map, const std::vector<std::size_t>& nodes);

// rho = L h / 2 ties the inflation to the source grid: the inflated sample
// covers the true image of the sampled region.
double default_inflation(const SampledMap& map);

}  // namespace mgt
