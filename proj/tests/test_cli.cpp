// End-to-end runs of the command line tool. Each case shells out to the real
// binary (path injected at compile time), captures stdout, and checks exit
// codes and emitted files.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

TEST_SUITE_BEGIN("cli");

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  static int counter = 0;
  const auto dir =
      fs::temp_directory_path() / ("mgt_cli_" + std::to_string(::getpid()) + "_" +
                                   std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args, std::string* output = nullptr) {
  const fs::path log = scratch_dir() / "stdout.txt";
  const std::string cmd =
      std::string(MGT_CLI_PATH) + " " + args + " >'" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  if (output != nullptr) *output = slurp(log);
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("gallery lists kinds and named maps") {
  std::string out;
  CHECK(run("gallery", &out) == 0);
  CHECK(out.find("fold") != std::string::npos);
  CHECK(out.find("projection") != std::string::npos);
  CHECK(out.find("kuratowski_image") != std::string::npos);
}

TEST_CASE("emitted manifest round-trips through the content verb") {
  const auto dir = scratch_dir();
  const auto manifest = dir / "proj17.json";
  CHECK(run("gallery --emit projection --grid 16 --out '" + manifest.string() + "'") == 0);
  REQUIRE(fs::exists(manifest));

  std::string out;
  CHECK(run("content --map '" + manifest.string() + "' --n 1", &out) == 0);
  // 17 nodes project to 17 cells of width 1/16
  CHECK(out.find("upper 1.0625") != std::string::npos);
}

TEST_CASE("verify writes reports and exits zero on a clean run") {
  const auto dir = scratch_dir();
  std::string out;
  CHECK(run("verify --out '" + dir.string() + "'", &out) == 0);
  CHECK(out.find("all checks passed") != std::string::npos);
  const std::string json = slurp(dir / "report.json");
  CHECK(json.find("\"all_pass\": true") != std::string::npos);
  CHECK(fs::exists(dir / "report.csv"));
}

TEST_CASE("config file drives the suite") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "skip.toml";
  std::ofstream(cfg) << "map = \"fold3\"\n\n[chart]\ntau_k = 0.0\n";
  std::string out;
  CHECK(run("verify --config '" + cfg.string() + "' --out '" + dir.string() + "'", &out) == 0);
  const std::string json = slurp(dir / "report.json");
  CHECK(json.find("\"skip\"") != std::string::npos);
  CHECK(json.find("tau_k = 0") != std::string::npos);
}

TEST_CASE("dyadic and exhaustive partition values agree on the projection") {
  std::string dp, full;
  CHECK(run("nm-content --map projection --n 1 --m 1 --depth 2", &dp) == 0);
  CHECK(run("nm-content --map projection --n 1 --m 1 --depth 2 --enumerate", &full) == 0);
  CHECK(dp.find("1.0078125") != std::string::npos);
  CHECK(full.find("1.0078125") != std::string::npos);
}

TEST_CASE("emit writes plot-ready csv") {
  const auto dir = scratch_dir();
  CHECK(run("emit --kind density --map projection --stride 32 --n 1 --radii-h 25.5,12.5 "
            "--out '" +
            dir.string() + "'") == 0);
  const std::string csv = slurp(dir / "density.csv");
  CHECK(csv.rfind("x,y,r,ratio", 0) == 0);

  CHECK(run("emit --kind partition --map projection --n 1 --m 1 --depth 2 --out '" +
            dir.string() + "'") == 0);
  CHECK(slurp(dir / "partition.csv").rfind("address,side,content,term", 0) == 0);
}

TEST_CASE("failures map to distinct exit codes") {
  std::string out;
  // unknown map name: usage error
  CHECK(run("content --map nosuchmap", &out) == 2);
  CHECK(out.find("unknown map") != std::string::npos);
  // unreadable config: usage error
  CHECK(run("verify --config /nonexistent/cfg.toml", &out) == 2);
  // an impossible tolerance makes the density/jacobian comparison fail
  CHECK(run("verify-prop52 --map fold3 --stride 8 --radii-h 10.5,5.5,2.5 --tol 1e-15", &out) ==
        1);
  CHECK(out.find("pass fraction") != std::string::npos);
  // missing subcommand is a parse error, CLI11's own exit code
  CHECK(run("", &out) != 0);
}

TEST_SUITE_END();
