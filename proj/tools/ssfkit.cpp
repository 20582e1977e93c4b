#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssfkit/config.hpp"
#include "ssfkit/experiment.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> ell;
  std::optional<double> phi;
  std::optional<std::string> R;
  bool print = false;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ssfkit::ConfigError(std::string(flag) + ": bad number '" + item + "'");
    }
  }
  if (values.empty()) throw ssfkit::ConfigError(std::string(flag) + ": empty list");
  return values;
}

ssfkit::ExperimentConfig resolve(const Overrides& o) {
  ssfkit::ExperimentConfig config = ssfkit::load_config(o.config_path);
  if (o.ell) config.ell_list = parse_list(*o.ell, "--ell");
  if (o.phi) config.phi = *o.phi;
  if (o.R) {
    const auto r = parse_list(*o.R, "--R");
    if (r.size() != 4) throw ssfkit::ConfigError("--R: expected four entries R11,R12,R21,R22");
    config.R << r[0], r[1], r[2], r[3];
  }
  if (o.out) config.output_dir = *o.out;
  try {
    config.validate();
  } catch (const ssfkit::ConfigError& e) {
    throw ssfkit::ConfigError(std::string("after command-line overrides: ") + e.what());
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral shift functions for Schroedinger operators on growing intervals"};
  app.require_subcommand(1);
  Overrides overrides;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"constants", "coupling constants and lower spectral bounds"},
      {"spectrum", "coupled, Dirichlet and line eigenvalues"},
      {"ssf", "finite-interval and line spectral shift functions on a grid"},
      {"krein-check", "resolvent identity residual and coefficient determinant"},
      {"converge", "pairings of the spectral shift function against test functions"},
      {"trace-ideals", "trace-class and Hilbert-Schmidt norm diagnostics"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", overrides.config_path, "config file")->required();
    sub->add_option("--out", overrides.out, "output directory (overrides experiment.output_dir)");
    sub->add_option("--ell", overrides.ell, "comma-separated interval half-lengths, e.g. 4,8,16,32");
    sub->add_option("--phi", overrides.phi, "boundary phase in [0, pi)");
    sub->add_option("--R", overrides.R, "boundary matrix entries R11,R12,R21,R22");
    sub->add_flag("--print", overrides.print, "also write the CSV to stdout");
  }
  CLI11_PARSE(app, argc, argv);

  const CLI::App* chosen = app.get_subcommands().front();
  ssfkit::ExperimentConfig config;
  try {
    config = resolve(overrides);
  } catch (const ssfkit::Error& e) {
    std::fprintf(stderr, "ssfkit: config error: %s\n", e.what());
    return 2;
  }
  try {
    const auto command = ssfkit::parse_subcommand(chosen->get_name());
    const ssfkit::ResultTable table = ssfkit::run(config, command);
    ssfkit::write_outputs(config, table, config.output_dir);
    if (overrides.print) std::cout << table.csv();
    std::fprintf(stderr, "ssfkit: wrote %s/%s.csv (%zu rows)\n", config.output_dir.c_str(), table.name.c_str(),
                 table.rows.size());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ssfkit: %s\n", e.what());
    return 1;
  }
  return 0;
}
