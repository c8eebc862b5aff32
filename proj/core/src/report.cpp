#include "mgt/report.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "mgt/csv.hpp"
#include "mgt/errors.hpp"

namespace mgt {

using nlohmann::json;

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "?";
}

bool VerifyReport::all_pass() const {
  for (const auto& row : rows) {
    if (row.status == CheckStatus::Fail) return false;
  }
  return true;
}

std::string report_json(const VerifyReport& rep) {
  json j;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"id", r.id},
                    {"status", check_status_name(r.status)},
                    {"measured", r.measured},
                    {"bound", r.bound},
                    {"slack", r.slack},
                    {"note", r.note}});
  }
  j["checks"] = std::move(rows);
  json fp;
  for (const auto& [key, value] : rep.fingerprint) fp[key] = value;
  j["fingerprint"] = std::move(fp);
  j["all_pass"] = rep.all_pass();
  return j.dump(2) + "\n";
}

std::string report_csv(const VerifyReport& rep) {
  CsvWriter w({"id", "status", "measured", "bound", "slack", "note"});
  for (const auto& r : rep.rows) {
    w.row({r.id, check_status_name(r.status), format_double(r.measured),
           format_double(r.bound), format_double(r.slack), r.note});
  }
  return w.str();
}

void save_report(const VerifyReport& rep, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  std::ofstream js(base / "report.json", std::ios::binary);
  js << report_json(rep);
  std::ofstream cs(base / "report.csv", std::ios::binary);
  cs << report_csv(rep);
  if (!js || !cs) throw Error("report: cannot write under " + dir);
}

namespace {

std::vector<std::string> coordinate_header(std::size_t dim) {
  if (dim == 2) return {"x", "y"};
  std::vector<std::string> h;
  for (std::size_t a = 0; a < dim; ++a) h.push_back("x" + std::to_string(a));
  return h;
}

}  // namespace

std::string density_field_csv(const std::vector<DensityProfile>& field) {
  if (field.empty()) throw EmptyInput("density csv: empty field");
  auto header = coordinate_header(field.front().x.size());
  header.push_back("r");
  header.push_back("ratio");
  CsvWriter w(std::move(header));
  std::vector<std::string> row;
  for (const auto& p : field) {
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
      row.clear();
      for (double c : p.x) row.push_back(format_double(c));
      row.push_back(format_double(p.radii[i]));
      row.push_back(format_double(p.ratios[i]));
      w.row(row);
    }
  }
  return w.str();
}

std::string ladder_csv(const DensityProfile& profile) {
  CsvWriter w({"r", "ratio"});
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    w.row({format_double(profile.radii[i]), format_double(profile.ratios[i])});
  }
  return w.str();
}

std::string partition_csv(const PartitionResult& part) {
  CsvWriter w({"address", "side", "content", "term"});
  for (const auto& cube : part.per_cube) {
    w.row({cube.address, format_double(cube.side), format_double(cube.content_upper),
           format_double(cube.term)});
  }
  return w.str();
}

}  // namespace mgt
