#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlskt/cli.hpp"
#include "nlskt/config.hpp"
#include "nlskt/errors.hpp"

using namespace nlskt;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "nlskt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_and_dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path find_suffix(const fs::path& dir, const std::string& part) {
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().find(part) != std::string::npos) return e.path();
  }
  return {};
}

fs::path fresh(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config defaults, overrides and round trip") {
  for (const auto& sub : RunConfig::subcommands()) {
    auto c = RunConfig::defaults(sub);
    RunConfig back = RunConfig::defaults(sub);
    back.set("output.dir", "elsewhere");
    back.load_string(c.to_ini());
    CHECK(back == c);
  }
  auto c = RunConfig::defaults("simulate");
  c.set_assignment("grid.cells=64");
  CHECK(c.get_int("grid.cells") == 64);
  CHECK_THROWS_AS(c.set("grid.nonsense", "1"), ConfigError);
  try {
    c.set_assignment("solver.bogus=3");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("solver.bogus") != std::string::npos);
  }
  c.set("grid.cells", "abc");
  CHECK_THROWS_AS(c.get_int("grid.cells"), ConfigError);
  CHECK_THROWS_AS(RunConfig::defaults("plot"), ConfigError);
  auto t = RunConfig::defaults("localize");
  CHECK(t.get_list("study.ratios").size() == 13);
}

TEST_CASE("parsers") {
  CHECK(std::holds_alternative<DiracKernel>(parse_kernel("dirac")));
  auto ind = parse_kernel("indicator:6.25");
  REQUIRE(std::holds_alternative<IndicatorKernel>(ind));
  CHECK(std::get<IndicatorKernel>(ind).width == 6.25);
  CHECK(std::get<AnnulusKernel>(parse_kernel("annulus-quadrant")).quadrant_restricted);
  CHECK_THROWS_AS(parse_kernel("gauss"), ConfigError);
  CHECK(std::holds_alternative<SegelLevin>(parse_reaction("segel-levin", "")));
  auto lv = parse_reaction("lotka-volterra", "1,2,3,4,5,6");
  CHECK(std::get<LotkaVolterra>(lv).a2[2] == 6.0);
  CHECK_THROWS_AS(parse_reaction("lotka-volterra", "1,2"), ConfigError);
  auto prof = parse_profile("const:1+box:2:0:1+cos:0.5:1.57");
  CHECK(prof.size() == 3);
  CHECK_THROWS_AS(parse_profile("spline:1"), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(run({"simulate", "--config", "/nonexistent/file.ini"}) == 2);
  CHECK(run({"simulate", "--set", "grid.unknown=1"}) == 2);
  CHECK(run({"simulate", "--set", "coefficients.d1=-1", "--out", fresh("nlskt_cli_neg").string()}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({}) == 2);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("simulate writes outputs deterministically") {
  auto a = fresh("nlskt_cli_a"), b = fresh("nlskt_cli_b");
  const std::vector<std::string> common{"--set", "grid.cells=32", "--set", "time.t_final=1", "--set", "time.dt=0.25"};
  auto args_a = std::vector<std::string>{"simulate", "--out", a.string()};
  auto args_b = std::vector<std::string>{"simulate", "--out", b.string()};
  args_a.insert(args_a.end(), common.begin(), common.end());
  args_b.insert(args_b.end(), common.begin(), common.end());
  REQUIRE(run(args_a) == 0);
  REQUIRE(run(args_b) == 0);
  CHECK(fs::exists(a / "resolved_config"));
  auto da = find_suffix(a, "_diag_"), db = find_suffix(b, "_diag_");
  REQUIRE(!da.empty());
  CHECK(read_all(da) == read_all(db));
  // H column is monotone
  std::ifstream in(da);
  std::string line;
  std::getline(in, line);
  double prev = 1e300;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f;
    for (int c = 0; c < 5; ++c) std::getline(ss, f, ',');
    const double h = std::stod(f);
    CHECK(h <= prev + 1e-12);
    prev = h;
    ++rows;
  }
  CHECK(rows == 4);

  // resolved config reproduces the run
  auto c = fresh("nlskt_cli_c");
  REQUIRE(run({"simulate", "--config", (a / "resolved_config").string(), "--out", c.string()}) == 0);
  CHECK(read_all(find_suffix(c, "_diag_")) == read_all(da));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("other subcommands") {
  auto k = fresh("nlskt_cli_k");
  CHECK(run({"kolmogorov-check", "--out", k.string(), "--set", "kolmogorov.cells=32"}) == 0);
  CHECK(!find_suffix(k, ".csv").empty());
  auto bd = fresh("nlskt_cli_bd");
  CHECK(run({"bounded-entropy", "--out", bd.string(), "--set", "bounded.steps=3"}) == 0);
  CHECK(!find_suffix(bd, ".csv").empty());
  auto cv = fresh("nlskt_cli_cv");
  CHECK(run({"converge", "--kernel", "smooth", "--ic", "indicator", "--out", cv.string(), "--set", "study.levels=3",
             "--set", "study.fit_levels=2"}) == 0);
  CHECK(!find_suffix(cv, "_table.csv").empty());
  CHECK(fs::exists(cv / "resolved_config"));
  for (const auto& d : {k, bd, cv}) fs::remove_all(d);
}
