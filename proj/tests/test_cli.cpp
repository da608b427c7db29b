#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = JURYMECH_CLI_PATH;
const fs::path kFixtures = JURYMECH_FIXTURES;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("jurymech_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>" + (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("solve both solvers on F2") {
  const auto out = scratch() / "f2.json";
  REQUIRE(run("solve " + fixture("f2.json") + " --solver both --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["objective_gap"].get<double>() < 1e-8);
  CHECK(j["structured"]["objective"].get<double>() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(j["lp"]["x"][1].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("solve in rational mode") {
  const auto out = scratch() / "f9r.json";
  REQUIRE(run("solve " + fixture("f9.json") + " --mode rational --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["objective_exact"] == "9722224/16763355");
}

TEST_CASE("solve error codes") {
  CHECK(run("solve " + fixture("f2_indifferent.json")) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("A3") != std::string::npos);
  CHECK(run("solve " + (kFixtures / "missing.json").string()) == 1);
  CHECK(run("solve " + fixture("f2.json") + " --solver simplex") == 2);
}

TEST_CASE("verify") {
  const auto out = scratch() / "verify_f2.json";
  REQUIRE(run("verify " + fixture("f2.json") + " --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["summary"]["all_passed"] == true);
  CHECK(j["instances"][0]["report"]["lemmas"]["08_monotone_optimum_is_lowered"]["status"] == "pass");

  const auto r1 = scratch() / "r1.json";
  const auto r2 = scratch() / "r2.json";
  REQUIRE(run("verify --random-instances 30 --seed 7 --out " + r1.string()) == 0);
  REQUIRE(run("verify --random-instances 30 --seed 7 --out " + r2.string()) == 0);
  CHECK(slurp(r1) == slurp(r2));
}

TEST_CASE("sweep") {
  const auto out = scratch() / "sweep.csv";
  REQUIRE(run("sweep " + fixture("sweep_f9.json") + " --out " + out.string()) == 0);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line ==
        "variable_value,k_J,k_P,conflict,t_bar_P,objective,k_lo,k_hi,x_lo,x_hi,monotone,responsive,ic_b_binding,"
        "status");
  int rows = 0;
  bool seen_nonmonotone = false;
  bool transition_ok = false;
  double previous = 0.0;
  while (std::getline(csv, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 14);
    const bool monotone = cells[10] == "true";
    const double value = std::stod(cells[0]);
    if (!monotone && !seen_nonmonotone) {
      seen_nonmonotone = true;
      // the certificate is tight on F9: the switch happens at the first grid point past it
      const double t_bar = std::stod(cells[4]);
      transition_ok = previous <= t_bar && t_bar < value;
    }
    previous = value;
  }
  CHECK(rows == 50);
  CHECK(seen_nonmonotone);
  CHECK(transition_ok);

  const auto low = scratch() / "low.csv";
  REQUIRE(run("sweep " + fixture("sweep_low.json") + " --out " + low.string()) == 0);
  std::istringstream lows(slurp(low));
  std::getline(lows, line);
  int low_rows = 0;
  while (std::getline(lows, line)) {
    ++low_rows;
    CHECK(line.find(",false,") != std::string::npos);
  }
  CHECK(low_rows == 3);

  CHECK(run("sweep " + fixture("sweep_empty.json")) == 2);
}

TEST_CASE("simulate") {
  const auto a = scratch() / "sim_a.json";
  const auto b = scratch() / "sim_b.json";
  const std::string args = "simulate " + fixture("f2.json") + " " + fixture("f2_optimal.json") +
                           " --trials 200000 --seed 42 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  const auto j = nlohmann::json::parse(slurp(a));
  CHECK(std::abs(j["principal_mean"].get<double>() - j["principal_exact"].get<double>()) <
        4.0 * j["principal_se"].get<double>());

  CHECK(run("simulate " + fixture("f2.json") + " " + fixture("f2_optimal.json") + " --trials 0") == 2);
  CHECK(run("simulate " + fixture("f2.json") + " " + fixture("short_mechanism.json")) == 2);
}
