#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "splx/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SPLX_BIN) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("splx_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("verify on stationary data passes") {
  const auto out = scratch("verify");
  CHECK(run("verify --init stationary --n 60 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "reports" / "verify.json"));
  CHECK(j["passed"].get<bool>());
  CHECK(j["suite_version"] == splx::kSuiteVersion);
  fs::remove_all(out);
}

TEST_CASE("simulate is bit reproducible and stamped") {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  CHECK(run("simulate --n 60 --out " + a.string()) == 0);
  CHECK(run("simulate --n 60 --out " + b.string()) == 0);
  CHECK(slurp(a / "snapshots" / "snapshots.bin") == slurp(b / "snapshots" / "snapshots.bin"));
  const auto ja = slurp(a / "snapshots" / "snapshots.jsonl");
  const auto header = nlohmann::json::parse(ja.substr(0, ja.find('\n')));
  CHECK(header["header"]["config_hash"].get<std::string>().size() == 16);
  CHECK(fs::exists(a / "logs" / "transitions.json"));
  CHECK(fs::exists(a / "reports" / "manifest.json"));
  CHECK(run("fluct --out " + a.string()) == 0);
  CHECK(fs::exists(a / "reports" / "fluctuations.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("error exits") {
  const auto out = scratch("err");
  CHECK(run("fluct --out " + out.string()) == 3);
  CHECK(run("simulate --set lattice.bogus=1 --out " + out.string()) == 2);
  CHECK(run("simulate --dt 5 --out " + out.string()) == 2);
  CHECK(run("frobnicate") != 0);
  fs::remove_all(out);
}

TEST_CASE("sweep, stefan and compare") {
  const auto out = scratch("sweep");
  const std::string common = " --init front_pinning --n-list 40,80 --out " + out.string();
  CHECK(run("sweep --tau-fin 0.02" + common) == 0);
  CHECK(run("compare --tau-fin 0.02 --set stefan.cells=200" + common) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "reports" / "convergence.json"));
  CHECK(j["N"].size() == 2);
  CHECK(fs::exists(out / "reports" / "interface_curves.csv"));
  // different macroscopic data than the stored sweep
  CHECK(run("compare --tau-fin 0.02 --init hot_left --n-list 40,80 --out " + out.string()) != 0);
  CHECK(run("stefan --tau-fin 0.02 --init front_pinning --set stefan.cells=200 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "reports" / "stefan_curve.csv"));
  fs::remove_all(out);
}

TEST_CASE("toy") {
  const auto out = scratch("toy");
  CHECK(run("toy --t-fin 5 --window 60 --out " + out.string()) == 0);
  const auto csv = slurp(out / "reports" / "toy.csv");
  CHECK(csv.rfind("# suite_version=", 0) == 0);
  fs::remove_all(out);
}
