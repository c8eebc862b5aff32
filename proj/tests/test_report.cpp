#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mgt/errors.hpp"
#include "mgt/gallery.hpp"
#include "mgt/partition.hpp"
#include "mgt/report.hpp"

using namespace mgt;

namespace {

Box unit_square() { return Box{{0.0, 0.0}, {1.0, 1.0}}; }

VerifyReport sample_report() {
  VerifyReport rep;
  rep.rows.push_back({"alpha", CheckStatus::Pass, 1.5, 2.0, 0.5, "fine"});
  rep.rows.push_back({"beta", CheckStatus::Skip, 0.0, 0.0, 0.0, "not requested"});
  rep.rows.push_back({"gamma", CheckStatus::Fail, 3.0, 2.0, -1.0, "over the cap"});
  rep.fingerprint = {{"grids", "9x9"}, {"seed", "42"}};
  return rep;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("report");

TEST_CASE("status names and the pass verdict") {
  CHECK(std::string(check_status_name(CheckStatus::Pass)) == "pass");
  CHECK(std::string(check_status_name(CheckStatus::Fail)) == "fail");
  CHECK(std::string(check_status_name(CheckStatus::Skip)) == "skip");

  VerifyReport rep;
  rep.rows.push_back({"a", CheckStatus::Pass, 0, 0, 0, ""});
  rep.rows.push_back({"b", CheckStatus::Skip, 0, 0, 0, "later"});
  CHECK(rep.all_pass());
  rep.rows.push_back({"c", CheckStatus::Fail, 0, 0, 0, ""});
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("json serialization is stable and complete") {
  const auto rep = sample_report();
  const auto text = report_json(rep);
  CHECK(text == report_json(rep));
  CHECK(text.find("\"all_pass\": false") != std::string::npos);
  CHECK(text.find("\"id\": \"beta\"") != std::string::npos);
  CHECK(text.find("\"status\": \"skip\"") != std::string::npos);
  CHECK(text.find("\"note\": \"over the cap\"") != std::string::npos);
  CHECK(text.find("\"seed\": \"42\"") != std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("csv rows mirror the checks") {
  const auto text = report_csv(sample_report());
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "id,status,measured,bound,slack,note");
  std::getline(ss, line);
  CHECK(line == "alpha,pass,1.5,2,0.5,fine");
  std::getline(ss, line);
  CHECK(line == "beta,skip,0,0,0,not requested");
  std::getline(ss, line);
  CHECK(line == "gamma,fail,3,2,-1,over the cap");
}

TEST_CASE("reports persist under a directory") {
  const auto rep = sample_report();
  const auto dir = std::filesystem::temp_directory_path() / "mgt_report_out";
  std::filesystem::remove_all(dir);
  save_report(rep, dir.string());
  CHECK(slurp(dir / "report.json") == report_json(rep));
  CHECK(slurp(dir / "report.csv") == report_csv(rep));
  std::filesystem::remove_all(dir);
}

TEST_CASE("density plot data flattens ladders to rows") {
  DensityProfile p;
  p.x = {0.5, 0.25};
  p.radii = {0.2, 0.1};
  p.ratios = {1.0, 0.5};
  DensityProfile q;
  q.x = {0.75, 0.75};
  q.radii = {0.2};
  q.ratios = {2.0};
  const auto text = density_field_csv({p, q});
  CHECK(text ==
        "x,y,r,ratio\n"
        "0.5,0.25,0.2,1\n"
        "0.5,0.25,0.1,0.5\n"
        "0.75,0.75,0.2,2\n");

  DensityProfile three;
  three.x = {0.1, 0.2, 0.3};
  three.radii = {0.5};
  three.ratios = {1.5};
  CHECK(density_field_csv({three}).rfind("x0,x1,x2,r,ratio\n", 0) == 0);

  CHECK_THROWS_AS(density_field_csv({}), EmptyInput);

  CHECK(ladder_csv(p) ==
        "r,ratio\n"
        "0.2,1\n"
        "0.1,0.5\n");
}

TEST_CASE("partition plot data lists the cut set") {
  const auto map = make_projection_map(2, 1, unit_square(), {17, 17});
  const auto part = nm_content_dyadic(map, 1, 1, 2);
  const auto text = partition_csv(part);
  CHECK(text ==
        "address,side,content,term\n"
        "0,1,1.0625,1.0625\n");
}

TEST_SUITE_END();
