#include "ssfkit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ssfkit/krein.hpp"
#include "ssfkit/spectrum.hpp"
#include "ssfkit/ssf.hpp"
#include "ssfkit/trace_ideals.hpp"
#include "ssfkit/transfer.hpp"

namespace ssfkit {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

std::string context(const char* what, const std::vector<std::pair<const char*, std::string>>& params) {
  std::string out = what;
  for (const auto& [k, v] : params) out += std::string(" ") + k + "=" + v;
  return out;
}

// runs f, tagging any library error with the row parameters
template <typename F>
auto guarded(const char* what, const std::vector<std::pair<const char*, std::string>>& params, F&& f) {
  try {
    return f();
  } catch (const ExperimentError&) {
    throw;
  } catch (const Error& e) {
    throw ExperimentError(context(what, params) + ": " + e.what());
  }
}

std::vector<double> krein_points(const ExperimentConfig& config, const CouplingConstants& c) {
  if (!config.z_list.empty()) return config.z_list;
  const double k = c.k_r_max + 1;
  return {-k * k};
}

ResultTable constants_table(const ExperimentConfig& config) {
  ResultTable t{"constants", {"quantity", "value", "error_bound"}, {}};
  const CouplingConstants c = bc_constants(config.potential, config.boundary());
  const double mass_error = 1e-12 * static_cast<double>(config.potential.pieces().size()) + 4 * eps * c.m_v;
  auto row = [&](const char* name, double value, double error) {
    t.rows.push_back({name, format_number(value), format_number(error)});
  };
  row("M_V", c.m_v, mass_error);
  row("N_R", c.n_r, 4 * eps * c.n_r);
  row("k_R0", c.k_r0, 16 * eps * std::max(1.0, std::abs(c.k_r0)));
  row("k_Rmax", c.k_r_max, 16 * eps * std::max(1.0, c.k_r_max));
  row("lower_bound_interval", c.lower_bound_interval, mass_error + 4 * eps * std::abs(c.lower_bound_interval));
  row("lower_bound_line", c.lower_bound_line, mass_error * (1 + 2 * c.m_v) + 4 * eps * std::abs(c.lower_bound_line));
  return t;
}

ResultTable spectrum_table(const ExperimentConfig& config) {
  ResultTable t{"spectrum", {"lambda", "multiplicity", "kind", "ell", "error_bound"}, {}};
  const BoundaryData bc = config.boundary();
  auto emit = [&](const EigenvalueList& list, const char* kind, const std::string& ell) {
    for (std::size_t i = 0; i < list.size(); ++i)
      t.rows.push_back({format_number(list.values[i]), std::to_string(list.multiplicity[i]), kind, ell,
                        format_number(list.tolerance)});
  };
  for (double ell : config.ell_list) {
    const std::string e = format_number(ell);
    emit(guarded("spectrum coupled", {{"ell", e}},
                 [&] { return eigenvalues_coupled(config.potential.truncated(ell), bc, ell, config.lambda_max); }),
         "coupled", e);
  }
  for (double ell : config.ell_list) {
    const std::string e = format_number(ell);
    emit(guarded("spectrum dirichlet", {{"ell", e}},
                 [&] { return eigenvalues_dirichlet(config.potential.truncated(ell), ell, config.lambda_max); }),
         "dirichlet", e);
  }
  emit(guarded("spectrum line", {}, [&] { return bound_states_line(config.potential); }), "line", "inf");
  return t;
}

std::vector<double> lambda_grid(const ExperimentConfig& config) {
  std::vector<double> grid;
  const auto steps = static_cast<long>(std::floor((config.grid_hi - config.grid_lo) / config.grid_step + 1e-9));
  for (long i = 0; i <= steps; ++i) grid.push_back(config.grid_lo + static_cast<double>(i) * config.grid_step);
  return grid;
}

// distance to the nearest jump, for flagging grid points a tolerance away from an eigenvalue
bool near_jump(const std::vector<double>& jumps, double lambda, double tolerance) {
  auto it = std::lower_bound(jumps.begin(), jumps.end(), lambda - tolerance);
  return it != jumps.end() && *it <= lambda + tolerance;
}

ResultTable ssf_table(const ExperimentConfig& config) {
  ResultTable t{"ssf", {"ell", "lambda", "xi_finite", "xi_line", "error_bound"}, {}};
  const BoundaryData bc = config.boundary();
  const SsfLine line = guarded("ssf line", {}, [&] { return SsfLine(config.potential); });
  const std::vector<double> grid = lambda_grid(config);
  std::vector<double> line_values;
  for (double l : grid) line_values.push_back(line(l));
  std::vector<double> line_jumps = line.bound_states().values;
  line_jumps.push_back(0);
  for (double ell : config.ell_list) {
    const std::string e = format_number(ell);
    const SsfFinite finite = guarded("ssf finite", {{"ell", e}}, [&] {
      return SsfFinite(config.potential, bc, ell, config.lambda_max);
    });
    const double tol = finite.perturbed().tolerance;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double l = grid[i];
      // an integer step within the eigenvalue tolerance may fall on either side
      double bound = near_jump(finite.jumps(), l, tol) ? 2.0 : 0.0;
      bound += near_jump(line_jumps, l, tol) ? 1.0 : (l > 0 ? 1e-9 : 0.0);
      t.rows.push_back({e, format_number(l), std::to_string(finite(l)), format_number(line_values[i]),
                        format_number(bound)});
    }
  }
  return t;
}

ResultTable krein_table(const ExperimentConfig& config) {
  ResultTable t{"krein-check", {"ell", "z", "residual", "det_k_re", "det_k_im", "abs_det_k", "error_bound"}, {}};
  const BoundaryData bc = config.boundary();
  const CouplingConstants c = bc_constants(config.potential, bc);
  std::vector<double> zs = krein_points(config, c);
  std::sort(zs.begin(), zs.end());
  for (double ell : config.ell_list) {
    const Potential local = config.potential.truncated(ell);
    for (double z : zs) {
      const std::string e = format_number(ell), zz = format_number(z);
      guarded("krein-check", {{"ell", e}, {"z", zz}}, [&] {
        const double residual = krein_identity_residual(local, bc, z, ell, default_probes(ell));
        const KreinMatrix k = krein_matrix(basis_solutions(local, z, ell), bc, z, ell);
        // the same matrix from a basis propagated at a looser tolerance
        const KreinMatrix loose = krein_matrix(NumericBasis(local, z, ell, 1e-9).boundary_values(), bc, z, ell);
        // floored at the propagation tolerance, since both may take the same steps
        const double bound = std::max(std::abs(k.det - loose.det), 1e-11 * std::max(1.0, std::abs(k.det)));
        t.rows.push_back({e, zz, format_number(residual), format_number(k.det.real()), format_number(k.det.imag()),
                          format_number(std::abs(k.det)), format_number(bound)});
        return 0;
      });
    }
  }
  return t;
}

ResultTable converge_table(const ExperimentConfig& config) {
  ResultTable t{"converge",
                {"ell", "test_function", "weighted", "pairing_finite", "pairing_line", "gap", "error_bound"},
                {}};
  const BoundaryData bc = config.boundary();
  std::vector<bool> weights;
  if (config.weighting != Weighting::unweighted) weights.push_back(true);
  if (config.weighting != Weighting::weighted) weights.push_back(false);
  const SsfLine line = guarded("converge line", {}, [&] { return SsfLine(config.potential); });
  struct Reference {
    PairingResult result;
    bool skipped;
  };
  std::vector<std::vector<Reference>> reference(config.test_functions.size());
  for (std::size_t i = 0; i < config.test_functions.size(); ++i) {
    const TestFunction& f = config.test_functions[i];
    for (bool w : weights) {
      // unweighted pairings exist only for compactly supported f
      if (!w && !f.compact()) {
        reference[i].push_back({{}, true});
        continue;
      }
      reference[i].push_back({guarded("converge line", {{"test_function", f.name()}},
                                      [&] { return pairing(line, f, w, config.lambda_max); }),
                              false});
    }
  }
  for (double ell : config.ell_list) {
    const std::string e = format_number(ell);
    const SsfFinite finite =
        guarded("converge finite", {{"ell", e}},
                [&] { return SsfFinite(config.potential, bc, ell, config.lambda_max); });
    for (std::size_t i = 0; i < config.test_functions.size(); ++i) {
      const TestFunction& f = config.test_functions[i];
      for (std::size_t j = 0; j < weights.size(); ++j) {
        if (reference[i][j].skipped) continue;
        const bool w = weights[j];
        const PairingResult p = guarded("converge finite", {{"ell", e}, {"test_function", f.name()}},
                                        [&] { return pairing(finite, f, w); });
        const PairingResult& r = reference[i][j].result;
        const double bound = p.quadrature_error + p.tail_bound + r.quadrature_error + r.tail_bound;
        t.rows.push_back({e, f.name(), w ? "1" : "0", format_number(p.value), format_number(r.value),
                          format_number(std::abs(p.value - r.value)), format_number(bound)});
      }
    }
  }
  return t;
}

ResultTable trace_table(const ExperimentConfig& config) {
  ResultTable t{"trace-ideals", {"mode", "parameter", "p", "norm", "n_nodes", "kind", "error_bound"}, {}};
  DiagnosticConfig d{config.potential, config.boundary()};
  d.ell = config.trace_ell;
  d.z = config.trace_z;
  d.k_list = config.k_list;
  d.ell_list = config.trace_ell_list;
  std::vector<DiagnosticRow> rows;
  for (auto mode : {DiagnosticMode::z_to_minus_infinity, DiagnosticMode::ell_to_infinity}) {
    const char* name = mode == DiagnosticMode::z_to_minus_infinity ? "z_to_minus_infinity" : "ell_to_infinity";
    auto part = guarded("trace-ideals", {{"mode", name}}, [&] { return diagnostic_series(d, mode); });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const DiagnosticRow& a, const DiagnosticRow& b) {
    if (a.mode != b.mode) return a.mode > b.mode;  // z_to_minus_infinity first
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.parameter < b.parameter;
  });
  for (const auto& r : rows)
    t.rows.push_back({r.mode, format_number(r.parameter), std::to_string(r.p), format_number(r.norm),
                      std::to_string(r.n_nodes), r.kind, format_number(r.error_bound)});
  return t;
}

}  // namespace

Subcommand parse_subcommand(std::string_view name) {
  if (name == "constants") return Subcommand::constants;
  if (name == "spectrum") return Subcommand::spectrum;
  if (name == "ssf") return Subcommand::ssf;
  if (name == "krein-check") return Subcommand::krein_check;
  if (name == "converge") return Subcommand::converge;
  if (name == "trace-ideals") return Subcommand::trace_ideals;
  throw InvalidArgument("unknown subcommand '" + std::string(name) + "'");
}

std::string subcommand_name(Subcommand command) {
  switch (command) {
    case Subcommand::constants: return "constants";
    case Subcommand::spectrum: return "spectrum";
    case Subcommand::ssf: return "ssf";
    case Subcommand::krein_check: return "krein-check";
    case Subcommand::converge: return "converge";
    case Subcommand::trace_ideals: return "trace-ideals";
  }
  return "";
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  if (value == 0) value = 0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string ResultTable::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const bool quote = row[i].find(',') != std::string::npos;
      out += i ? "," : "";
      out += quote ? '"' + row[i] + '"' : row[i];
    }
    out += '\n';
  }
  return out;
}

ResultTable run(const ExperimentConfig& config, Subcommand command) {
  config.validate();
  switch (command) {
    case Subcommand::constants: return constants_table(config);
    case Subcommand::spectrum: return spectrum_table(config);
    case Subcommand::ssf: return ssf_table(config);
    case Subcommand::krein_check: return krein_table(config);
    case Subcommand::converge: return converge_table(config);
    case Subcommand::trace_ideals: return trace_table(config);
  }
  throw InvalidArgument("run: unknown subcommand");
}

std::string sidecar_json(const ExperimentConfig& config, const ResultTable& table) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["subcommand"] = table.name;
  j["columns"] = table.columns;
  j["rows"] = table.rows.size();
  ordered_json potential;
  potential["kind"] = config.potential_spec.kind;
  for (const auto& [key, values] : config.potential_spec.parameters)
    potential[key] = values.size() == 1 ? ordered_json(values.front()) : ordered_json(values);
  potential["describe"] = config.potential.describe();
  j["potential"] = potential;
  j["boundary"] = {{"phi", config.phi},
                   {"R", {{config.R(0, 0), config.R(0, 1)}, {config.R(1, 0), config.R(1, 1)}}}};
  ordered_json e;
  e["ell_list"] = config.ell_list;
  e["lambda_max"] = config.lambda_max;
  e["z_list"] = config.z_list;
  std::vector<std::string> functions;
  for (const auto& f : config.test_functions) functions.push_back(f.name());
  e["test_functions"] = functions;
  e["weighting"] = config.weighting == Weighting::both       ? "both"
                   : config.weighting == Weighting::weighted ? "weighted"
                                                             : "unweighted";
  e["lambda_grid"] = {config.grid_lo, config.grid_hi, config.grid_step};
  e["k_list"] = config.k_list;
  e["trace_ell"] = config.trace_ell;
  e["trace_z"] = config.trace_z;
  e["trace_ell_list"] = config.trace_ell_list;
  e["output_dir"] = config.output_dir;
  j["experiment"] = e;
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentConfig& config, const ResultTable& table, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
  };
  write(fs::path(dir) / (table.name + ".csv"), table.csv());
  write(fs::path(dir) / (table.name + ".json"), sidecar_json(config, table));
}

}  // namespace ssfkit
