#pragma once

// Spectral bound of the transport-with-renewal generators.
//
// The primary route is the characteristic equation K(lambda) = 1 with
//   K(lambda) = ∫_fertile (beta/gamma)(s) exp(-∫_0^s (lambda + mu)/gamma) ds,
// which is strictly decreasing in lambda. The upwind matrix discretization
// is an independent first-order oracle for the same quantity.

#include <string_view>
#include <vector>

#include "popsteady/models.hpp"
#include "popsteady/numerics.hpp"

namespace popsteady {

/// K(lambda) for a fixed environment. Rates are sampled once on
/// construction; each evaluation costs one pass of exponentials.
class CharacteristicFn {
 public:
  CharacteristicFn(const TransportSystem& system, const Environment& env);

  double operator()(double lambda) const;
  GridFn survival(double lambda) const;

  const TransportSystem& system() const noexcept { return *system_; }
  const Environment& environment() const noexcept { return env_; }

 private:
  const TransportSystem* system_;
  Environment env_;
  std::vector<double> mortality_integral_;  // ∫_0^s mu/gamma
  std::vector<double> residence_time_;      // ∫_0^s 1/gamma
  std::vector<double> fertility_weight_;    // beta/gamma on the fertile nodes
};

enum class SpectralMethod { Characteristic, Matrix };

std::string_view to_string(SpectralMethod method);

struct SpectralResult {
  double bound = 0.0;
  double residual = 0.0;  // |K(bound) - 1| or the matrix eigen-residual
  int iterations = 0;
  SpectralMethod method = SpectralMethod::Characteristic;
};

inline constexpr double kSpectralBracketLimit = 1e3;

/// exp(-∫_0^s (mu + lambda)/gamma) on the system grid.
GridFn survival(const TransportSystem& system, const Environment& env, double lambda);

double characteristic_value(const TransportSystem& system, const Environment& env, double lambda);

/// Root of K(lambda) = 1. The bracket starts on the side of 0 given by
/// K(0) and doubles up to kSpectralBracketLimit; sign(bound) = sign(K(0) - 1).
SpectralResult spectral_bound(const TransportSystem& system, const Environment& env, double tol = 1e-12);

/// sign(K_env(0) - 1), which equals the sign of the spectral bound.
int spectral_bound_sign(const TransportSystem& system, const Environment& env);

/// Normalized positive eigenvector (gamma(0)/gamma(s)) * survival(s), unit L1 norm.
Profile eigen_profile(const TransportSystem& system, const Environment& env, double lambda);

/// First-order upwind finite-volume discretization of the generator on the
/// system grid, order n_cells + 1. The renewal condition enters row 0 as
/// the influx (∫ beta p)/h. The result is Metzler.
DenseMatrix assemble_generator_matrix(const TransportSystem& system, const Environment& env);

/// Rightmost eigenvalue of the upwind matrix.
SpectralResult matrix_spectral_bound(const TransportSystem& system, const Environment& env, double tol = 1e-10);

/// Explicit resolvent (lambda - Psi_E)^{-1} f = (c + G) H with
///   F = exp(-∫(lambda+mu)/gamma), H = F/gamma, G = ∫_0^s f/F,
///   c = ∫_fertile h F G / (1 - ∫_fertile h F), h = beta/gamma.
/// Throws ResolventConditionViolated when ∫ h F >= 1.
Profile resolvent_apply(const TransportSystem& system, const Environment& env, double lambda, const Profile& f);

/// Largest L1 distance between the two resolvents over `probe_count` unit
/// L1 probes (one constant and probe_count - 1 hat functions). A lower bound
/// on the operator-norm distance.
double resolvent_distance(const TransportSystem& system, const Environment& env1, const Environment& env2,
                          double lambda, int probe_count = 32);

struct Multiplicity {
  int geometric = 0;
  int algebraic = 0;
  int order = 0;  // matrix order the multiplicities refer to
};

/// Multiplicities of `lambda` as an eigenvalue of m: geometric = order -
/// rank(m - lambda I); algebraic = order - rank((m - lambda I)^k) once the
/// rank stops dropping. Pivots below rank_tol * ||(m - lambda I)^k||_inf count as zero.
Multiplicity multiplicity(const DenseMatrix& m, double lambda, double rank_tol = 1e-7);

/// Multiplicity of lambda for the upwind matrix of the system at env.
Multiplicity multiplicity_diagnostic(const TransportSystem& system, const Environment& env, double lambda,
                                     double rank_tol = 1e-7);

}  // namespace popsteady
