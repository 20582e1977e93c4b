#include <doctest.h>

#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ssfkit/config.hpp"
#include "ssfkit/experiment.hpp"

using namespace ssfkit;

namespace {

const char* square_well_text = R"ini(
[potential]
kind = square_well
depth = 1
halfwidth = 1

[boundary]
phi = pi/3
R = [[1, 1], [0, 1]]

[experiment]
ell_list = [4, 8]
lambda_max = 100
test_functions = ["bump(-1,9)", "one", "indicator(0,10)"]
)ini";

std::string with_boundary(const std::string& boundary) {
  return "[potential]\nkind = square_well\ndepth = 1\nhalfwidth = 1\n[boundary]\n" + boundary;
}

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ssfkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(SSFKIT_BINARY) + " " + args + " 2>/dev/null";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config with defaults") {
  const auto c = parse_config(square_well_text);
  CHECK(c.potential.kind() == Potential::Kind::square_well);
  CHECK(c.phi == doctest::Approx(pi / 3).epsilon(1e-15));
  CHECK(c.R(0, 1) == 1);
  CHECK(c.lambda_max == 100);
  CHECK(c.ell_list == std::vector<double>{4, 8});
  CHECK(c.z_list.empty());
  CHECK(c.test_functions.size() == 3);
  CHECK(c.output_dir == "out");
  CHECK(parse_config(with_boundary("R = [[1, 1], [0, 1]]\n")).lambda_max == 400);
}

TEST_CASE("shear with half off-diagonal is accepted") {
  const auto c = parse_config(with_boundary("R = [[1, 0.5], [0, 1]]\n"));
  CHECK(bc_constants(c.potential, c.boundary()).n_r == doctest::Approx(8));
}

TEST_CASE("boundary data violations are rejected") {
  CHECK_THROWS_WITH_AS(parse_config(with_boundary("R = [[1, 0], [1, 1]]\n")), doctest::Contains("R12"), ConfigError);
  CHECK_THROWS_AS(parse_config(with_boundary("phi = pi\nR = [[1, 1], [0, 1]]\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with_boundary("phi = -0.1\nR = [[1, 1], [0, 1]]\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with_boundary("R = [[1, 1], [0, 2]]\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with_boundary("phi = 0\n")), ConfigError);
}

TEST_CASE("parse errors carry line and column") {
  CHECK(config_error_line("[potential]\nkind = square_well\ndepth = \n") == 3);
  CHECK(config_error_line("[potential]\nkind = zero\nkind = zero\n") == 3);
  CHECK(config_error_line("[potential]\nkind = zero\n[boundary]\nR = [[1, 1], [0, 1]]\nfrobnicate = 2\n") == 5);
  CHECK(config_error_line("[potential]\nkind = zero\n[boundary]\nR = [[1, 1], [0, 1]\n") > 0);
  CHECK(config_error_line("[nonsense]\n") == 1);
  try {
    parse_config("[potential]\nkind = zero\n[boundary]\nR = [[1, 1], [0, 1]]\nphi = 2 / 0\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 5);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("unknown potential kind and missing parameters") {
  CHECK_THROWS_AS(parse_config("[potential]\nkind = lorentzian\n[boundary]\nR = [[1, 1], [0, 1]]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[potential]\nkind = square_well\ndepth = 1\n[boundary]\nR = [[1, 1], [0, 1]]\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(square_well_text) + "weighting = sometimes\n"), ConfigError);
}

TEST_CASE("constants table") {
  const auto t = run(parse_config(square_well_text), Subcommand::constants);
  CHECK(t.columns == std::vector<std::string>{"quantity", "value", "error_bound"});
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[0][0] == "M_V");
  CHECK(std::stod(t.rows[0][1]) == doctest::Approx(2));
  CHECK(t.rows[1][1] == "4");
  CHECK(std::stod(t.rows[4][1]) == doctest::Approx(-7));
  CHECK(std::stod(t.rows[5][1]) == doctest::Approx(-6));
}

TEST_CASE("converge with the free potential has zero gaps") {
  const auto c = parse_config(R"ini(
[potential]
kind = zero
[boundary]
R = [[0, 1], [-1, 0]]
[experiment]
ell_list = [1, 2, 4]
lambda_max = 50
test_functions = ["bump(-1,9)", "one", "indicator(0,10)"]
)ini");
  const auto t = run(c, Subcommand::converge);
  const auto gap = std::find(t.columns.begin(), t.columns.end(), "gap") - t.columns.begin();
  REQUIRE(!t.rows.empty());
  for (const auto& row : t.rows) CHECK(std::stod(row[gap]) == 0);
}

TEST_CASE("converge rows are sorted by ell and carry error bounds") {
  const auto t = run(parse_config(square_well_text), Subcommand::converge);
  CHECK(t.columns.back() == "error_bound");
  // bump and indicator both ways, one weighted only
  CHECK(t.rows.size() == 2 * 5);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(std::stod(t.rows[i][0]) >= std::stod(t.rows[i - 1][0]));
  for (const auto& row : t.rows) CHECK(std::stod(row.back()) >= 0);
}

TEST_CASE("tables are deterministic") {
  const auto c = parse_config(square_well_text);
  for (auto command : {Subcommand::constants, Subcommand::krein_check, Subcommand::converge, Subcommand::ssf}) {
    const std::string a = run(c, command).csv(), b = run(c, command).csv();
    CHECK(a == b);
  }
}

TEST_CASE("csv quotes fields with commas") {
  const ResultTable t{"demo", {"name", "value"}, {{"bump(-1,9)", "1"}, {"plain", "2"}}};
  CHECK(t.csv() == "name,value\n\"bump(-1,9)\",1\nplain,2\n");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("computational errors name the offending row") {
  const auto c = parse_config(R"ini(
[potential]
kind = zero
[boundary]
R = [[0, 1], [-1, 0]]
[experiment]
ell_list = [1]
z_list = [pi * pi / 4]
)ini");
  CHECK_THROWS_WITH_AS(run(c, Subcommand::krein_check), doctest::Contains("ell=1"), ExperimentError);
}

TEST_CASE("sidecar records the resolved config") {
  const auto c = parse_config(square_well_text);
  const auto t = run(c, Subcommand::constants);
  const auto j = nlohmann::json::parse(sidecar_json(c, t));
  CHECK(j["subcommand"] == "constants");
  CHECK(j["experiment"]["lambda_max"] == 100);
  CHECK(j["boundary"]["R"][0][1] == 1);
  CHECK(j["columns"].size() == 3);
}

TEST_CASE("command line writes byte-identical outputs") {
  const auto dir = scratch_dir("determinism");
  const std::string config = std::string(SSFKIT_CONFIG_DIR) + "/square_well.ini";
  for (const char* name : {"a", "b"}) {
    const std::string out = (dir / name).string();
    REQUIRE(run_cli("converge --config " + config + " --ell 4,8 --out " + out) == 0);
    REQUIRE(run_cli("constants --config " + config + " --out " + out) == 0);
  }
  for (const char* file : {"converge.csv", "constants.csv"}) {
    const std::string a = read_file(dir / "a" / file), b = read_file(dir / "b" / file);
    CHECK(!a.empty());
    CHECK(a == b);
  }
  const std::string csv = read_file(dir / "a" / "converge.csv");
  CHECK(csv.find("\n16,") == std::string::npos);
  CHECK(csv.find("\n8,") != std::string::npos);
}

TEST_CASE("command line rejects bad input with exit code two") {
  const auto dir = scratch_dir("errors");
  const std::string config = std::string(SSFKIT_CONFIG_DIR) + "/square_well.ini";
  const std::string out = " --out " + (dir / "x").string();
  CHECK(run_cli("constants --config " + config + " --phi 3.2" + out) == 2);
  CHECK(run_cli("constants --config " + config + " --R 1,0,1,1" + out) == 2);
  CHECK(run_cli("constants --config " + config + " --ell 4,x" + out) == 2);
  CHECK(run_cli("constants --config /nonexistent.ini" + out) == 2);
  CHECK(run_cli("constants --config " + config + " --R 1,0.5,0,1" + out) == 0);
  const std::string csv = read_file(dir / "x" / "constants.csv");
  CHECK(csv.find("N_R,8,") != std::string::npos);
  CHECK(run_cli("frobnicate --config " + config) != 0);
}
