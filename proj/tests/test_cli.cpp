#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlsq/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLSQ_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("nlsq_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("fnv hash is stable and content sensitive") {
  CHECK(nlsq::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(nlsq::fnv1a("a") != nlsq::fnv1a("b"));
  CHECK(nlsq::fnv1a("abc") == nlsq::fnv1a("abc"));
}

TEST_CASE("csv export carries the manifest header") {
  const std::string text =
      nlsq::csv_text(42, 0xdeadbeef, {"a", "b"}, {{1.0, 2.5}});
  CHECK(text.rfind("# seed 42\n", 0) == 0);
  CHECK(text.find("# config 00000000deadbeef") != std::string::npos);
  CHECK(text.find("a,b\n") != std::string::npos);
  CHECK(text.find("1,2.5\n") != std::string::npos);
  CHECK_THROWS(nlsq::csv_text(1, 1, {"a"}, {{1.0, 2.0}}));
}

TEST_CASE("spectrum subcommand writes deterministic outputs") {
  const fs::path cfg = fresh_dir("cfg") / "spectrum.json";
  write_file(cfg, R"({"d": 1, "L": 10.0, "n": 32, "K": 8})");

  const fs::path out1 = fresh_dir("spec1");
  const fs::path out2 = fresh_dir("spec2");
  CHECK(run_cli("spectrum --config " + cfg.string() + " --seed 5 --out " +
                out1.string()) == 0);
  CHECK(run_cli("spectrum --config " + cfg.string() + " --seed 5 --out " +
                out2.string()) == 0);

  const std::string a = slurp(out1 / "spectrum.csv");
  CHECK(a == slurp(out2 / "spectrum.csv"));
  CHECK(a.rfind("# seed 5\n", 0) == 0);
  // header + column line + 8 rows
  CHECK(std::count(a.begin(), a.end(), '\n') == 11);
  CHECK(slurp(out1 / "hs_report.json") == slurp(out2 / "hs_report.json"));
}

TEST_CASE("seeds flow into the outputs") {
  const fs::path cfg = fresh_dir("cfg_seed") / "c.json";
  write_file(cfg, R"({"d": 1, "n": 32, "K": 4, "count": 5})");
  const fs::path out1 = fresh_dir("seed1");
  const fs::path out2 = fresh_dir("seed2");
  CHECK(run_cli("sample-field --config " + cfg.string() + " --seed 1 --out " +
                out1.string()) == 0);
  CHECK(run_cli("sample-field --config " + cfg.string() + " --seed 2 --out " +
                out2.string()) == 0);
  CHECK(slurp(out1 / "samples.csv") != slurp(out2 / "samples.csv"));
}

TEST_CASE("malformed config exits with the config code and no partial files") {
  const fs::path cfg = fresh_dir("cfg_bad") / "bad.json";
  write_file(cfg, "{ not json");
  const fs::path out = fresh_dir("bad_out");
  fs::remove_all(out);
  CHECK(run_cli("spectrum --config " + cfg.string() + " --out " +
                out.string()) == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("invalid parameter values exit with the config code") {
  const fs::path cfg = fresh_dir("cfg_badval") / "c.json";
  write_file(cfg, R"({"d": 3, "n": 32})");
  const fs::path out = fresh_dir("badval_out");
  CHECK(run_cli("spectrum --config " + cfg.string() + " --out " +
                out.string()) == 2);
}

TEST_CASE("dynamics with zero steps emits only the start point") {
  const fs::path cfg = fresh_dir("cfg_dyn") / "c.json";
  write_file(cfg, R"({"d": 1, "n": 32, "K": 4, "steps": 0, "alpha": 0.5})");
  const fs::path out = fresh_dir("dyn_out");
  CHECK(run_cli("dynamics --config " + cfg.string() + " --out " +
                out.string()) == 0);
  const std::string text = slurp(out / "trajectory.csv");
  // 2 manifest lines + columns + exactly one record
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("0,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("environment overrides the config seed") {
  const fs::path cfg = fresh_dir("cfg_env") / "c.json";
  write_file(cfg, R"({"d": 1, "n": 32, "K": 4, "count": 3, "seed": 9})");
  const fs::path out = fresh_dir("env_out");
  setenv("NLSQ_SEED", "77", 1);
  CHECK(run_cli("sample-field --config " + cfg.string() + " --out " +
                out.string()) == 0);
  unsetenv("NLSQ_SEED");
  CHECK(slurp(out / "samples.csv").rfind("# seed 77\n", 0) == 0);
}

TEST_CASE("check-conditions reports the summability identity") {
  const fs::path cfg = fresh_dir("cfg_cond") / "c.json";
  write_file(cfg, R"({"d": 1, "n": 32, "K": 8, "samples": 200})");
  const fs::path out = fresh_dir("cond_out");
  CHECK(run_cli("check-conditions --config " + cfg.string() + " --out " +
                out.string()) == 0);
  const std::string rep = slurp(out / "conditions.json");
  CHECK(rep.find("sum_beta_gamma") != std::string::npos);
  CHECK(rep.find("sum_lambda_sq") != std::string::npos);
}

TEST_CASE("selftest passes quickly") {
  CHECK(run_cli("--selftest") == 0);
}
