#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sls/experiments.hpp"
#include "sls/serialize.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("slsctl_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int runTool(const std::string& args) {
  const std::string cmd = std::string(SLSCTL_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pipeline chaining: simulate -> identify -> synthesize -> evaluate") {
  TempDir dir;
  sls::save_json(dir.file("plant.json"),
                 sls::to_json(sls::make_stable_chain(6)));

  CHECK(runTool("simulate --plant " + dir.file("plant.json") +
                " -T 200 --seed 42 -o " + dir.file("traj.json")) == 0);
  CHECK(runTool("identify --trajectory " + dir.file("traj.json") +
                " --c-lambda 0.05 -o " + dir.file("est.json")) == 0);
  CHECK(runTool("synthesize --estimate " + dir.file("est.json") +
                " --eps-bar 0.02 -L 4 -d 2 -c 2 -o " + dir.file("sol.json")) ==
        0);
  CHECK(runTool("evaluate --solution " + dir.file("sol.json") + " --plant " +
                dir.file("plant.json") + " --csv " + dir.file("rep.csv")) == 0);
  CHECK(slurp(dir.file("rep.csv")).find("config_hash") != std::string::npos);
}

TEST_CASE("infeasible synthesis exits with code 2") {
  TempDir dir;
  sls::save_json(dir.file("plant.json"),
                 sls::to_json(sls::make_stable_chain(4)));
  sls::Json cfg{{"plant", sls::load_json(dir.file("plant.json"))}};
  sls::save_json(dir.file("cfg.json"), cfg);
  CHECK(runTool("synthesize --config " + dir.file("cfg.json") +
                " --eps-bar 1e6 -L 3 -d 2 -c 2 -o " + dir.file("sol.json")) ==
        2);
}

TEST_CASE("same seed reproduces byte-identical outputs") {
  TempDir dir;
  sls::save_json(dir.file("plant.json"),
                 sls::to_json(sls::make_stable_chain(5)));
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    CHECK(runTool("simulate --plant " + dir.file("plant.json") +
                  " -T 100 --seed 7 -o " + dir.file("traj" + tag + ".json") +
                  " --csv " + dir.file("traj" + tag + ".csv")) == 0);
  }
  CHECK(slurp(dir.file("traj0.json")) == slurp(dir.file("traj1.json")));
  CHECK(slurp(dir.file("traj0.csv")) == slurp(dir.file("traj1.csv")));
  CHECK(!slurp(dir.file("traj0.csv")).empty());
}

TEST_CASE("malformed input file yields a descriptive error and code 1") {
  TempDir dir;
  {
    std::ofstream bad(dir.file("bad.json"));
    bad << "{ not json\n";
  }
  CHECK(runTool("identify --trajectory " + dir.file("bad.json") + " -o " +
                dir.file("out.json")) == 1);
}
