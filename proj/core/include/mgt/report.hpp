#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mgt/density.hpp"
#include "mgt/partition.hpp"

namespace mgt {

enum class CheckStatus { Pass, Fail, Skip };

const char* check_status_name(CheckStatus s);

// One acceptance check. slack is the signed margin to the bound, oriented so
// a nonnegative value means the comparison passed; note carries secondary
// numbers, the failure detail, or the skip reason.
struct CheckRow {
  std::string id;
  CheckStatus status = CheckStatus::Skip;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  std::string note;
};

// Suite result plus the parameters that shaped it. The fingerprint holds
// grid sizes, tolerances and the seed; never wall times or thread counts, so
// reruns of the same config serialize byte for byte.
struct VerifyReport {
  std::vector<CheckRow> rows;
  std::vector<std::pair<std::string, std::string>> fingerprint;  // key-sorted

  bool all_pass() const;  // no failed rows; skipped rows do not fail a run
};

// Deterministic serializations: sorted keys, shortest round-trip numbers,
// LF line endings, no timestamps.
std::string report_json(const VerifyReport& rep);
std::string report_csv(const VerifyReport& rep);

// Writes report.json and report.csv under dir, creating it if needed.
void save_report(const VerifyReport& rep, const std::string& dir);

// Plot-data emission: tidy CSV, one row per record.
// Density field rows are (point coordinates, radius, ratio).
std::string density_field_csv(const std::vector<DensityProfile>& field);
// Single-point ladder rows are (radius, ratio).
std::string ladder_csv(const DensityProfile& profile);
// Partition rows are (address, side, content, term), cut-set cubes only.
std::string partition_csv(const PartitionResult& part);

}  // namespace mgt
