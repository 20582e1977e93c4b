#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ssfkit/boundary.hpp"
#include "ssfkit/potential.hpp"
#include "ssfkit/ssf.hpp"

namespace ssfkit {

/// Parse or validation failure; line and column are 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

/// A value in the config tree: number, bare word or quoted string, boolean, or list.
struct ConfigValue {
  std::variant<double, std::string, bool, std::vector<ConfigValue>> data;
  int line = 0, column = 0;

  double number(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::vector<ConfigValue>& list(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
};

/// section -> key -> value, in file order within each section
using ConfigTree = std::map<std::string, std::vector<std::pair<std::string, ConfigValue>>>;

/// Reads `[section]` headers and `key = value` lines. Values are numbers
/// (with `pi` and `*`, `/`), true/false, bare words, "quoted strings" and
/// [lists], possibly nested. `#` starts a comment. The line of each section
/// header goes to `section_lines` when given.
ConfigTree parse_config_tree(std::string_view text, std::map<std::string, int>* section_lines = nullptr);

struct PotentialSpec {
  std::string kind = "zero";
  std::map<std::string, std::vector<double>> parameters;

  Potential build() const;
};

enum class Weighting { both, weighted, unweighted };

struct ExperimentConfig {
  PotentialSpec potential_spec;
  Potential potential;
  double phi = 0;
  Mat2 R = Mat2::Identity();

  std::vector<double> ell_list{4, 8, 16, 32};
  double lambda_max = 400;
  /// empty: a single z = -(k_{R,max} + 1)^2
  std::vector<double> z_list;
  std::vector<TestFunction> test_functions;
  Weighting weighting = Weighting::both;
  /// ssf grid: first, last, step
  double grid_lo = -0.5, grid_hi = 20, grid_step = 0.25;
  /// trace-ideal series
  std::vector<double> k_list{2, 4, 8, 16, 32, 64};
  double trace_ell = 2;
  double trace_z = -16;
  std::vector<double> trace_ell_list{2, 4, 8, 16, 32};
  std::string output_dir = "out";

  BoundaryData boundary() const { return BoundaryData(phi, R); }
  /// re-checks the boundary condition and the remaining ranges
  void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

}  // namespace ssfkit
