#include "ssfkit/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ssfkit {

namespace {

std::string located(const std::string& message, int line, int column) {
  if (line <= 0) return message;
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": " << message;
  return os.str();
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ConfigTree parse(std::map<std::string, int>* section_lines) {
    ConfigTree tree;
    std::string section;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        const int line = line_, column = column_;
        advance();
        skip_spaces();
        const std::string name = word();
        skip_spaces();
        expect(']');
        end_of_line();
        if (name.empty()) throw ConfigError("empty section name", line, column);
        section = name;
        tree[section];
        if (section_lines) section_lines->emplace(section, line);
        continue;
      }
      const int line = line_, column = column_;
      const std::string key = word();
      if (key.empty()) fail("expected a key or [section]");
      if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line, column);
      skip_spaces();
      expect('=');
      skip_spaces();
      ConfigValue value = parse_value();
      end_of_line();
      auto& entries = tree[section];
      for (const auto& [existing, _] : entries)
        if (existing == key) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line, column);
      entries.emplace_back(key, std::move(value));
    }
    return tree;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(message, line_, column_); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') advance();
  }

  // spaces, comments and newlines, as allowed inside lists
  void skip_whitespace() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() != '\n') return;
      advance();
    }
  }

  void skip_blank_lines() { skip_whitespace(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "'");
    advance();
  }

  // keys and section names; values may also contain '/'
  std::string word(bool value = false) {
    std::string out;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                         peek() == '.' || (value && peek() == '/')))
      out += text_[pos_], advance();
    return out;
  }

  ConfigValue parse_value() {
    ConfigValue value;
    value.line = line_;
    value.column = column_;
    const char c = peek();
    if (c == '[') {
      advance();
      std::vector<ConfigValue> items;
      skip_whitespace();
      if (peek() == ']') {
        advance();
      } else {
        while (true) {
          skip_whitespace();
          items.push_back(parse_value());
          skip_whitespace();
          if (peek() == ',') {
            advance();
            continue;
          }
          expect(']');
          break;
        }
      }
      value.data = std::move(items);
      return value;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (!at_end() && peek() != '"' && peek() != '\n') s += text_[pos_], advance();
      expect('"');
      value.data = std::move(s);
      return value;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || starts_with_pi()) {
      value.data = product();
      return value;
    }
    const std::string w = word(true);
    if (w.empty()) fail("expected a value");
    if (w == "true" || w == "false")
      value.data = (w == "true");
    else
      value.data = w;
    return value;
  }

  bool starts_with_pi() const {
    return text_.substr(pos_, 2) == "pi" &&
           (pos_ + 2 >= text_.size() || !std::isalnum(static_cast<unsigned char>(text_[pos_ + 2])));
  }

  double factor() {
    skip_spaces();
    double sign = 1;
    while (peek() == '-' || peek() == '+') {
      if (peek() == '-') sign = -sign;
      advance();
      skip_spaces();
    }
    if (starts_with_pi()) {
      advance();
      advance();
      return sign * pi;
    }
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const std::string tail(begin, std::min<std::size_t>(64, text_.size() - pos_));
    const double v = std::strtod(tail.c_str(), &end);
    const auto used = static_cast<std::size_t>(end - tail.c_str());
    if (used == 0) fail("expected a number");
    for (std::size_t i = 0; i < used; ++i) advance();
    return sign * v;
  }

  double product() {
    double v = factor();
    while (true) {
      skip_spaces();
      if (peek() == '*') {
        advance();
        v *= factor();
      } else if (peek() == '/') {
        const int line = line_, column = column_;
        advance();
        const double d = factor();
        if (d == 0) throw ConfigError("division by zero", line, column);
        v /= d;
      } else {
        return v;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, column_ = 1;
};

ConfigError field_error(const ConfigValue& value, const std::string& key, const std::string& what) {
  return ConfigError(key + ": " + what, value.line, value.column);
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, int column)
    : Error(located(message, line, column)), line_(line), column_(column) {}

double ConfigValue::number(const std::string& key) const {
  if (const auto* v = std::get_if<double>(&data)) return *v;
  throw field_error(*this, key, "expected a number");
}

const std::string& ConfigValue::text(const std::string& key) const {
  if (const auto* v = std::get_if<std::string>(&data)) return *v;
  throw field_error(*this, key, "expected a word or string");
}

bool ConfigValue::flag(const std::string& key) const {
  if (const auto* v = std::get_if<bool>(&data)) return *v;
  throw field_error(*this, key, "expected true or false");
}

const std::vector<ConfigValue>& ConfigValue::list(const std::string& key) const {
  if (const auto* v = std::get_if<std::vector<ConfigValue>>(&data)) return *v;
  throw field_error(*this, key, "expected a list");
}

std::vector<double> ConfigValue::numbers(const std::string& key) const {
  if (std::holds_alternative<double>(data)) return {number(key)};
  std::vector<double> out;
  for (const auto& item : list(key)) out.push_back(item.number(key));
  return out;
}

ConfigTree parse_config_tree(std::string_view text, std::map<std::string, int>* section_lines) {
  return Parser(text).parse(section_lines);
}

Potential PotentialSpec::build() const {
  auto scalar = [&](const std::string& name) {
    auto it = parameters.find(name);
    if (it == parameters.end()) throw ConfigError("potential." + name + " is required for kind " + kind);
    if (it->second.size() != 1) throw ConfigError("potential." + name + " must be a single number");
    return it->second.front();
  };
  auto list = [&](const std::string& name) {
    auto it = parameters.find(name);
    if (it == parameters.end()) throw ConfigError("potential." + name + " is required for kind " + kind);
    return it->second;
  };
  try {
    if (kind == "zero") return Potential::zero();
    if (kind == "square_well") return Potential::square_well(scalar("depth"), scalar("halfwidth"));
    if (kind == "gaussian") return Potential::gaussian(scalar("amplitude"), scalar("sigma"), scalar("cutoff"));
    if (kind == "poschl_teller")
      return Potential::poschl_teller(scalar("strength"), scalar("scale"), scalar("cutoff"));
    if (kind == "piecewise_constant") return Potential::piecewise_constant(list("breakpoints"), list("values"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  throw ConfigError("potential.kind: unknown kind '" + kind +
                    "' (zero, square_well, gaussian, poschl_teller, piecewise_constant)");
}

void ExperimentConfig::validate() const {
  try {
    (void)boundary();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (ell_list.empty()) throw ConfigError("experiment.ell_list: must not be empty");
  for (double ell : ell_list)
    if (!(ell > 0)) throw ConfigError("experiment.ell_list: lengths must be positive");
  for (double ell : trace_ell_list)
    if (!(ell > 0)) throw ConfigError("experiment.trace_ell_list: lengths must be positive");
  if (!(trace_ell > 0)) throw ConfigError("experiment.trace_ell: must be positive");
  if (!(lambda_max > 0)) throw ConfigError("experiment.lambda_max: must be positive");
  if (!(trace_z < 0)) throw ConfigError("experiment.trace_z: must be negative");
  for (double k : k_list)
    if (!(k > 0)) throw ConfigError("experiment.k_list: wavenumbers must be positive");
  if (!(grid_step > 0) || !(grid_hi >= grid_lo))
    throw ConfigError("experiment.lambda_grid: need first <= last, step > 0");
  if (grid_hi > lambda_max) throw ConfigError("experiment.lambda_grid: last point exceeds lambda_max");
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, int> section_lines;
  const ConfigTree tree = parse_config_tree(text, &section_lines);
  ExperimentConfig config;
  static const std::set<std::string> sections{"potential", "boundary", "experiment"};
  for (const auto& [name, line] : section_lines)
    if (!sections.count(name)) throw ConfigError("unknown section [" + name + "]", line, 1);

  if (auto it = tree.find("potential"); it != tree.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "kind")
        config.potential_spec.kind = value.text("potential.kind");
      else
        config.potential_spec.parameters[key] = value.numbers("potential." + key);
    }
  }

  std::optional<ConfigValue> phi_value;
  bool has_R = false;
  if (auto it = tree.find("boundary"); it != tree.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "phi") {
        config.phi = value.number("boundary.phi");
        phi_value = value;
      } else if (key == "R") {
        has_R = true;
        const auto& rows = value.list("boundary.R");
        if (rows.size() != 2) throw field_error(value, "boundary.R", "expected [[R11, R12], [R21, R22]]");
        for (int i = 0; i < 2; ++i) {
          const auto row = rows[i].numbers("boundary.R");
          if (row.size() != 2) throw field_error(rows[i], "boundary.R", "each row needs two entries");
          config.R(i, 0) = row[0];
          config.R(i, 1) = row[1];
        }
      } else {
        throw field_error(value, "boundary." + key, "unknown key (phi, R)");
      }
    }
  }

  if (auto it = tree.find("experiment"); it != tree.end()) {
    for (const auto& [key, value] : it->second) {
      const std::string name = "experiment." + key;
      if (key == "ell_list") {
        config.ell_list = value.numbers(name);
      } else if (key == "lambda_max") {
        config.lambda_max = value.number(name);
      } else if (key == "z_list") {
        config.z_list = value.numbers(name);
      } else if (key == "test_functions") {
        config.test_functions.clear();
        for (const auto& item : value.list(name)) {
          try {
            config.test_functions.push_back(TestFunction::parse(item.text(name)));
          } catch (const InvalidArgument& e) {
            throw field_error(item, name, e.what());
          }
        }
      } else if (key == "weighting") {
        const std::string& w = value.text(name);
        if (w == "both")
          config.weighting = Weighting::both;
        else if (w == "weighted")
          config.weighting = Weighting::weighted;
        else if (w == "unweighted")
          config.weighting = Weighting::unweighted;
        else
          throw field_error(value, name, "expected both, weighted or unweighted");
      } else if (key == "lambda_grid") {
        const auto g = value.numbers(name);
        if (g.size() != 3) throw field_error(value, name, "expected [first, last, step]");
        config.grid_lo = g[0];
        config.grid_hi = g[1];
        config.grid_step = g[2];
      } else if (key == "k_list") {
        config.k_list = value.numbers(name);
      } else if (key == "trace_ell") {
        config.trace_ell = value.number(name);
      } else if (key == "trace_z") {
        config.trace_z = value.number(name);
      } else if (key == "trace_ell_list") {
        config.trace_ell_list = value.numbers(name);
      } else if (key == "output_dir") {
        config.output_dir = value.text(name);
      } else {
        throw field_error(value, name, "unknown key");
      }
    }
  }

  if (config.test_functions.empty())
    config.test_functions = {TestFunction::bump(-1, 9), TestFunction::one(), TestFunction::indicator(0, 10)};
  config.potential = config.potential_spec.build();
  if (!has_R) throw ConfigError("boundary.R is required");
  try {
    (void)config.boundary();
  } catch (const InvalidArgument& e) {
    if (phi_value && std::string(e.what()).find("phi") != std::string::npos)
      throw field_error(*phi_value, "boundary.phi", e.what());
    throw ConfigError(e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ssfkit
