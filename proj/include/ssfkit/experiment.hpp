#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ssfkit/config.hpp"

namespace ssfkit {

enum class Subcommand { constants, spectrum, ssf, krein_check, converge, trace_ideals };

/// "constants", "spectrum", "ssf", "krein-check", "converge", "trace-ideals"
Subcommand parse_subcommand(std::string_view name);
std::string subcommand_name(Subcommand command);

/// Computational failure tagged with the parameters of the row being computed.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

/// Rows already formatted (numbers as %.17g), in output order.
struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

ResultTable run(const ExperimentConfig& config, Subcommand command);

/// The resolved config and the table layout, for the .json file next to the CSV.
std::string sidecar_json(const ExperimentConfig& config, const ResultTable& table);

/// Writes <dir>/<name>.csv and <dir>/<name>.json, creating dir if needed.
void write_outputs(const ExperimentConfig& config, const ResultTable& table, const std::string& dir);

std::string format_number(double value);

}  // namespace ssfkit
