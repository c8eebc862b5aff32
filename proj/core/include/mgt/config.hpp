#pragma once

#include <string>
#include <vector>

namespace mgt {

// Resolved experiment parameters with their defaults. Every field can be set
// from a config file; unknown keys there are errors, so typos surface at load
// instead of silently running the defaults.
struct ExperimentConfig {
  std::string map = "fold3";  // gallery name, or a path to a map manifest
  std::string out_dir = "out";
  int seed = 42;
  int threads = 0;  // 0 resolves from MGT_THREADS, then hardware

  // density ladders; radii_h are explicit radii in units of the grid pitch
  int stride = 8;
  int ladder_count = 8;
  double ladder_factor = 0.5;
  double ladder_top = 0.0;  // <= 0 picks a quarter of the reach
  std::vector<double> radii_h;
  std::string shape = "ball";

  // dyadic partition
  int n = 1;
  int m = 1;
  int depth = 5;

  // charts. tau_k < 0 asks for the ten-cell default; exactly 0 declares the
  // certified set empty, and the suite skips the checks that need one.
  double tau_k = -1.0;
  double rank_tol = 1e-6;
  double match_tol = 1e-6;

  // suite bounds
  double gap_tol = 0.05;
  double pass_fraction = 0.95;
  double slack_factor = 1.1;

  std::string source;  // file the values came from, empty for the defaults
};

ExperimentConfig default_config();

// Reads a config file. Paths ending in .json use the JSON mirror; everything
// else parses as the TOML subset below:
//   # comment
//   key = "string" | number | true | false | [number, ...]
//   [table]
// Tables are one level deep. Throws ConfigError carrying file and line (or
// JSON path) for unknown keys, type mismatches, bad values, and a map
// manifest reference that does not exist on disk.
ExperimentConfig load_config(const std::string& path);

// Serializations of a config, defaults included; load_config round-trips
// both. The TOML form is the reference format, the JSON form its mirror.
std::string config_toml(const ExperimentConfig& cfg);
std::string config_json(const ExperimentConfig& cfg);

}  // namespace mgt
