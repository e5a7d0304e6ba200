#pragma once

// Steady states as fixed points of environment maps on the zero set of the
// spectral bound, plus the state-space iteration and the fixed-ray
// iteration for strictly positive operators.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "popsteady/levelset.hpp"
#include "popsteady/models.hpp"
#include "popsteady/spectral.hpp"

namespace popsteady {

struct Diagnostics {
  double sigma_at_env = 0.0;       // spectral bound at the environment
  double env_consistency = 0.0;    // ||E(profile) - environment||_1
  double boundary_residual = 0.0;  // |gamma(0) p(0) - ∫ beta p|
  double ode_residual = 0.0;       // ||(gamma p)' + mu p||_1 by centered differences
  double r_value = 0.0;            // net reproduction at the environment
  double step = 0.0;               // grid step h the residuals refer to
  /// Consumer-resource only: |Q f(Q) - ∫ F p|.
  std::optional<double> resource_residual;
  /// Selection-mutation only: ||v - M_0 v||_1 for the newborn distribution.
  std::optional<double> renewal_residual;
  bool positive = true;  // false flags a negative or identically zero profile

  /// Residual tolerance 1e-6 for everything except ode_residual, which is
  /// allowed 10 h.
  bool passes(double tol = 1e-6) const;
};

using SteadyProfile = std::variant<Profile, Density2D>;

struct SteadyStateResult {
  Environment environment;
  double scale = 1.0;
  SteadyProfile profile = Profile(Grid(0.0, 1.0, 2));
  Diagnostics diagnostics;
  /// The environment has a zero component (crossing at a simplex endpoint).
  bool boundary = false;
  std::optional<Multiplicity> multiplicity;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Spectral bound as a level function; scans use sign(K(0) - 1).
LevelFunction spectral_level_function(const TransportSystem& system);

/// Simplex coordinate e2/(e1+e2) of E(F(s)) where s is the zero-set point
/// on the ray at theta and F(s) the normalized eigen profile at s.
double map_G(const TransportSystem& system, const LevelFunction& sigma, double theta, double r_max,
             double tol = 1e-10);
/// Same map evaluated at a traced curve sample (linear interpolation in theta between samples).
double map_G(const TransportSystem& system, const LevelCurve& curve, double theta);

struct CrossingSample {
  std::vector<double> t;  // strictly increasing
  std::vector<double> g;
};

struct Crossing {
  double t = 0.0;
  bool boundary = false;  // t is 0 or 1
};

/// Every sign change of g - t among the samples, refined by bisection of
/// refine(t) - t to tol. Samples with |g - t| <= tol count as crossings.
std::vector<Crossing> find_diagonal_crossings(const CrossingSample& samples,
                                              const std::function<double(double)>& refine, double tol = 1e-12);

/// First interior crossing, or the first boundary crossing if there is no
/// interior one. Throws NoCrossing with the sample table.
Crossing find_diagonal_crossing(const CrossingSample& samples, const std::function<double(double)>& refine,
                                double tol = 1e-12);

enum class SolveMethod { Irreducible, Monotone };

struct SolveOptions {
  int n_rays = 257;
  double r_max = 10.0;
  double tol = 1e-10;           // ray bisection
  double crossing_tol = 1e-12;  // diagonal-crossing bisection in t
  int multiplicity_cells = 200;
  double rank_tol = 1e-7;
  /// Search every level-curve branch present on all rays, not just the innermost.
  bool all_branches = false;
};

struct SolveReport {
  /// Interior solutions first, then boundary ones; never empty on return.
  std::vector<SteadyStateResult> solutions;
  LevelCurve curve;
  CrossingSample samples;
};

/// Throws HypothesisViolated unless the spectral bound is positive at the
/// origin and negative at r_max on both axes.
void check_spectral_hypotheses(const TransportSystem& system, double r_max);

/// Trace + map G + diagonal crossing + reconstruction. The monotone method
/// also checks the multiplicity of the spectral bound on a coarse upwind
/// matrix: geometric multiplicity above 1 throws HypothesisViolated, an
/// algebraic multiplicity above 1 is a warning.
SolveReport solve_steady_state(const TransportSystem& system, SolveMethod method, const SolveOptions& options);

/// Scales `profile` so its environment matches env_on_curve and fills the
/// diagnostics. Throws NotParallel when E(profile) and env_on_curve differ
/// in direction by more than 1e-6 rad.
SteadyStateResult reconstruct_steady_state(const TransportSystem& system, const Environment& env_on_curve,
                                           const Profile& profile);

/// Steady state whose environment is `env` (a point on the zero set), built
/// from the eigen profile. For the consumer-resource model the profile is
/// scaled to total mass P.
SteadyStateResult steady_state_from_environment(const TransportSystem& system, const Environment& env);

/// Recomputes all residuals for a transport-model result. Pure report.
Diagnostics verify_steady_state(const TransportSystem& system, const Environment& env, const Profile& profile);

struct StateSpaceOptions {
  double damping = 0.5;
  int max_iter = 1000;
  double tol = 1e-12;
  double r_max = 10.0;
  double ray_tol = 1e-10;
};

/// Averaged iteration x <- normalize((1-d) x + d F(eta(x))) on unit-mass profiles.
SteadyStateResult solve_state_space(const TransportSystem& system, const Profile& init,
                                    const StateSpaceOptions& options);

struct FixedRay {
  double eigenvalue = 0.0;
  std::vector<double> ray;  // nonnegative, unit L1
  int iterations = 0;
  double residual = 0.0;    // ||L x - eigenvalue x||_1
};

using LinearMap = std::function<std::vector<double>(const std::vector<double>&)>;

/// Averaged normalized iteration x <- normalize((x + normalize(L x))/2)
/// from the uniform vector until ||L x - ||L x||_1 x||_1 <= tol.
/// Throws StrictPositivityFailure when an iterate is mapped to 0.
FixedRay fixed_ray(const LinearMap& map, int dimension, double tol = 1e-12, int max_iter = 100000);

/// Matrix form; also throws StrictPositivityFailure for a zero column and
/// InvalidArgument for a negative entry.
FixedRay fixed_ray(const DenseMatrix& m, double tol = 1e-12, int max_iter = 100000);

}  // namespace popsteady
