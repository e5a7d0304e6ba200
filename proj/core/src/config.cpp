#include "popsteady/config.hpp"

#include <charconv>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "popsteady/error.hpp"
#include "popsteady/expression.hpp"

namespace popsteady {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(int line, const std::string& message) {
  throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": " + message);
}

double parse_real(std::string_view text, int line, std::string_view key) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    config_error(line, "'" + std::string(key) + "' needs a number, got '" + std::string(text) + "'");
  return v;
}

int parse_int(std::string_view text, int line, std::string_view key) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    config_error(line, "'" + std::string(key) + "' needs an integer, got '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view text, int line, std::string_view key) {
  if (text == "true") return true;
  if (text == "false") return false;
  config_error(line, "'" + std::string(key) + "' needs true or false, got '" + std::string(text) + "'");
}

void set_solver(SolverConfig& s, std::string_view key, std::string_view value, int line) {
  if (key == "method") {
    s.method = value;
  } else if (key == "n_cells") {
    s.n_cells = parse_int(value, line, key);
  } else if (key == "n_rays") {
    s.n_rays = parse_int(value, line, key);
  } else if (key == "r_max") {
    s.r_max = parse_real(value, line, key);
  } else if (key == "tol") {
    s.tol = parse_real(value, line, key);
  } else if (key == "damping") {
    s.damping = parse_real(value, line, key);
  } else if (key == "max_iter") {
    s.max_iter = parse_int(value, line, key);
  } else if (key == "multiplicity_cells") {
    s.multiplicity_cells = parse_int(value, line, key);
  } else if (key == "rank_tol") {
    s.rank_tol = parse_real(value, line, key);
  } else if (key == "partial_curve") {
    s.partial_curve = parse_bool(value, line, key);
  } else {
    config_error(line, "unknown solver key '" + std::string(key) + "'");
  }
}

}  // namespace

Config parse_config(std::string_view text) {
  Config c;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error(line_no, "section header must end with ']'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "parameters" && section != "rates" && section != "solver")
        config_error(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(line_no, "empty key");
    if (value.empty()) config_error(line_no, "empty value for '" + key + "'");
    if (section.empty()) config_error(line_no, "'" + key + "' appears before any section");
    if (!seen.insert(section + "." + key).second) config_error(line_no, "duplicate key '" + key + "' in [" + section + "]");

    if (section == "model") {
      if (key == "kind") {
        c.kind = value;
      } else {
        c.constants[key] = parse_real(value, line_no, key);
      }
    } else if (section == "parameters") {
      c.parameters[key] = parse_real(value, line_no, key);
    } else if (section == "rates") {
      c.rates[key] = value;
    } else {
      set_solver(c.solver, key, value, line_no);
    }
  }
  if (c.kind.empty()) throw Error(ErrorKind::ConfigError, "[model] kind is missing");
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

KindSpec kind_spec(std::string_view kind) {
  if (kind == "juvenile-adult") return {{"l", "m"}, {"beta", "mu", "gamma"}};
  if (kind == "consumer-resource") return {{"m"}, {"beta", "mu", "gamma", "feeding", "resource_growth"}};
  if (kind == "early-human") return {{"a_j", "a_r", "a_max"}, {"beta", "f_nat", "eta", "mu_sen"}};
  if (kind == "selection-mutation") return {{"a_m"}, {"kernel", "beta", "mu"}};
  throw Error(ErrorKind::ConfigError, "unknown model kind '" + std::string(kind) +
                                          "' (expected juvenile-adult, consumer-resource, early-human or "
                                          "selection-mutation)");
}

namespace {

using Slots = std::map<std::string, int, std::less<>>;

Slots slots_for(std::string_view kind, std::string_view role) {
  if (kind == "juvenile-adult") return {{"s", 0}, {"E1", 1}, {"E2", 2}, {"J", 1}, {"A", 2}};
  if (kind == "consumer-resource") {
    if (role == "resource_growth") return {{"Q", 0}, {"E2", 0}};
    return {{"s", 0}, {"E1", 1}, {"E2", 2}, {"P", 1}, {"Q", 2}};
  }
  if (kind == "early-human") return {{"a", 0}, {"s", 0}};
  if (role == "kernel") return {{"l", 0}, {"lhat", 1}};
  return {{"E1", 0}, {"E2", 1}, {"P", 0}, {"Q", 1}, {"lhat", 2}, {"l", 2}, {"a", 3}};
}

}  // namespace

std::vector<std::string> rate_variables(std::string_view kind, std::string_view role) {
  std::vector<std::string> out;
  for (const auto& [name, slot] : slots_for(kind, role)) out.push_back(name);
  return out;
}

Model build_model(const Config& config) {
  const KindSpec spec = kind_spec(config.kind);
  for (const auto& name : spec.constants)
    if (!config.constants.count(name)) throw Error(ErrorKind::ConfigError, "[model] " + name + " is missing");
  for (const auto& [name, v] : config.constants)
    if (std::find(spec.constants.begin(), spec.constants.end(), name) == spec.constants.end())
      throw Error(ErrorKind::ConfigError, "[model] " + name + " is not a constant of the " + config.kind + " model");
  for (const auto& name : spec.rates)
    if (!config.rates.count(name)) throw Error(ErrorKind::ConfigError, "[rates] " + name + " is missing");
  for (const auto& [name, text] : config.rates)
    if (std::find(spec.rates.begin(), spec.rates.end(), name) == spec.rates.end())
      throw Error(ErrorKind::ConfigError, "[rates] " + name + " is not a rate of the " + config.kind + " model");

  const std::map<std::string, double, std::less<>> params(config.parameters.begin(), config.parameters.end());
  auto compile = [&](const std::string& role) {
    try {
      return std::make_shared<const CompiledExpression>(Expression::parse(config.rates.at(role)),
                                                        slots_for(config.kind, role), params);
    } catch (const ParseError& e) {
      throw ParseError(e.position(), e.expected() + " in rate '" + role + "'");
    } catch (const Error& e) {
      throw Error(e.kind(), "rate '" + role + "': " + e.detail());
    }
  };
  auto field = [&](const std::string& role) -> RateField {
    auto c = compile(role);
    return [c](double s, const Environment& e) {
      const double args[3] = {s, e.e1, e.e2};
      return (*c)(args);
    };
  };
  auto age_map = [&](const std::string& role) -> AgeMap {
    auto c = compile(role);
    return [c](double a) { return (*c)(&a); };
  };
  const auto& k = config.constants;

  if (config.kind == "juvenile-adult") {
    return JuvenileAdultModel{k.at("l"), k.at("m"), field("beta"), field("mu"), field("gamma")};
  }
  if (config.kind == "consumer-resource") {
    return ConsumerResourceModel{k.at("m"),        field("beta"),    field("mu"),
                                 field("gamma"),   field("feeding"), age_map("resource_growth")};
  }
  if (config.kind == "early-human") {
    return EarlyHumanModel{k.at("a_j"),      k.at("a_r"),   k.at("a_max"),      age_map("beta"),
                           age_map("f_nat"), age_map("eta"), age_map("mu_sen")};
  }
  auto kernel = compile("kernel");
  auto field2 = [&](const std::string& role) -> RateField2 {
    auto c = compile(role);
    return [c](const Environment& e, double lhat, double a) {
      const double args[4] = {e.e1, e.e2, lhat, a};
      return (*c)(args);
    };
  };
  return SelectionMutationModel{k.at("a_m"),
                                [kernel](double l, double lhat) {
                                  const double args[2] = {l, lhat};
                                  return (*kernel)(args);
                                },
                                field2("beta"), field2("mu")};
}

}  // namespace popsteady
