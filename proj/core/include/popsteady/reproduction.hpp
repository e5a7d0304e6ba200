#pragma once

// Net reproduction numbers and the scalar characterization of steady
// states: R(E) = 1 together with a ratio (juvenile-adult) or resource
// balance (consumer-resource) equation in the two environment variables.

#include <string>
#include <vector>

#include "popsteady/levelset.hpp"
#include "popsteady/models.hpp"

namespace popsteady {

/// R(J,A) = ∫_l^m beta/gamma exp(-∫_0^s mu/gamma) ds.
double net_reproduction_ja(const TransportSystem& system, const Environment& env);
/// R(P,Q) = ∫_0^m beta/gamma exp(-∫_0^s mu/gamma) ds.
double net_reproduction_cr(const TransportSystem& system, const Environment& env);
/// Dispatches on the system kind (the early-human R uses the same integral).
double net_reproduction(const TransportSystem& system, const Environment& env);

/// J D(E) - A N(E) with N = ∫_0^l omega, D = ∫_l^m omega,
/// omega = (gamma(0)/gamma(s)) exp(-∫_0^s mu/gamma).
double ja_ratio_residual(const TransportSystem& system, const Environment& env);

/// P D_F(E) - Q f(Q) N(E) with N = ∫ omega, D_F = ∫ F omega.
double cr_balance_residual(const TransportSystem& system, const Environment& env);

struct ScalarSolution {
  Environment environment;
  double r_residual = 0.0;        // |R(E) - 1|
  double balance_residual = 0.0;  // |ratio or balance residual|
  bool negative_resource_growth = false;  // f(Q) < 0 at the root
};

struct ScalarSystemResult {
  std::vector<ScalarSolution> solutions;
  /// Roots with a zero environment component; not positive steady states.
  std::vector<Environment> boundary_roots;
  std::vector<std::string> warnings;
};

struct ScalarOptions {
  int n_rays = 257;
  double r_max = 10.0;
  double tol = 1e-10;
  /// Trace only the rays on which R - 1 changes sign and search each
  /// contiguous run of them. Needed when R does not depend on one
  /// environment variable, so R - 1 stays positive along that axis.
  bool allow_partial_curve = false;
};

/// Level function R - 1 with a cheap sign.
LevelFunction reproduction_level_function(const TransportSystem& system);

/// Traces R = 1 and returns every sign change of the ratio/balance residual
/// along it, each refined by bisection in the ray angle.
/// Throws HypothesisViolated if R(0,0) <= 1 or a ray lacks an outer sign change.
ScalarSystemResult solve_scalar_system(const TransportSystem& system, const ScalarOptions& options);

}  // namespace popsteady
