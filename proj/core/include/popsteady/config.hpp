#pragma once

// Model configuration documents.
//
//   # comment
//   [model]
//   kind = juvenile-adult        (consumer-resource | early-human | selection-mutation)
//   l = 1                        structural constants of the kind
//   m = 2
//   [parameters]                 optional named constants usable in rates
//   b0 = 3
//   [rates]
//   beta = b0*indicator(1, 2, s)/(1 + J + A)
//   mu = 0
//   gamma = 1
//   [solver]                     optional; every key has a default
//   n_cells = 2000
//
// Keys are unique within a section; unknown sections and keys are errors.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "popsteady/models.hpp"

namespace popsteady {

struct SolverConfig {
  std::string method;  // empty: chosen on the command line
  int n_cells = 2000;
  int n_rays = 257;
  double r_max = 10.0;
  double tol = 1e-10;
  double damping = 0.5;
  int max_iter = 1000;
  int multiplicity_cells = 200;
  double rank_tol = 1e-7;
  bool partial_curve = false;  // scalar route: skip rays without a sign change of R - 1
};

struct Config {
  std::string kind;
  std::map<std::string, double> constants;
  std::map<std::string, double> parameters;
  std::map<std::string, std::string> rates;
  SolverConfig solver;
};

/// Throws ConfigError naming the line for syntax problems and unknown keys.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Constants and rate roles a model kind needs.
struct KindSpec {
  std::vector<std::string> constants;
  std::vector<std::string> rates;
};
/// Throws ConfigError for an unknown kind.
KindSpec kind_spec(std::string_view kind);

/// Variables each rate role may use, including the model's aliases
/// (J/A, P/Q, S/T for E1/E2).
std::vector<std::string> rate_variables(std::string_view kind, std::string_view role);

/// Compiles every rate. Throws ConfigError for missing or unknown entries,
/// ParseError and UnboundVariable from the expressions.
Model build_model(const Config& config);

}  // namespace popsteady
