#pragma once

// Selection-mutation model on the square [0,a_m]^2 (maturation age l, age a).
// Newborn distributions v(l) evolve through the kernel operator
//   (M_lambda v)(l) = ∫ b(l,lhat) [∫_lhat^a_m beta(E,lhat,a) exp(-∫_0^a mu(E,lhat,r) dr - lambda a) da] v(lhat) dlhat
// whose spectral radius crosses 1 exactly at the spectral bound.

#include <string>
#include <vector>

#include "popsteady/fixedpoint.hpp"
#include "popsteady/models.hpp"
#include "popsteady/numerics.hpp"

namespace popsteady {

using MaturityFn = GridFn;

/// Discretized M_lambda on the l-grid: entry (i,j) = w_j b(l_i, lhat_j) I_j(lambda)
/// with trapezoid weights w_j.
struct KernelMatrix {
  Grid grid;
  std::vector<double> weights;
  DenseMatrix matrix;
};

/// Induced norm of the kernel on L1(0,a_m): max_j (sum_i w_i K_ij) / w_j.
double weighted_norm(const KernelMatrix& k);

struct KernelRadius {
  double radius = 0.0;
  MaturityFn eigen;   // nonnegative, unit weighted L1 norm
  bool zero = false;  // the kernel annihilated the constant seed
  int iterations = 0;
};

/// Power iteration seeded with the constant function, normalized in the
/// weighted L1 norm. A kernel that maps the seed to 0 returns radius 0 with `zero` set.
KernelRadius kernel_spectral_radius(const KernelMatrix& k, double tol = 1e-13, int max_iter = 100000);

/// Precomputed pieces of the kernel for one model and grid. The mutation
/// kernel is sampled once; survival-weighted fertility once per environment.
class SelMutSystem {
 public:
  SelMutSystem(SelectionMutationModel model, int n_cells);

  const SelectionMutationModel& model() const noexcept { return model_; }
  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  KernelMatrix kernel(const Environment& env, double lambda) const;
  double radius(const Environment& env, double lambda) const;

  /// Root of r(M_lambda) = 1 by bracket expansion and bisection.
  double spectral_bound(const Environment& env, double tol = 1e-12) const;
  int spectral_bound_sign(const Environment& env) const;

  /// u(l,a) = v(l) exp(-∫_0^a (mu + lambda)), unit total mass.
  Density2D eigen_density(const Environment& env, double lambda) const;

  Environment environment(const Density2D& u) const { return environment_sm(u, model_); }

  /// Strict positivity of the assembled kernel: false if some row or column vanishes.
  bool kernel_strictly_positive(const Environment& env) const;

 private:
  struct Fertility {
    std::vector<double> mass;  // row j: beta exp(-∫mu) at nodes a_k, k >= j
  };
  Fertility fertility(const Environment& env) const;
  KernelMatrix assemble(const Fertility& f, double lambda) const;

  SelectionMutationModel model_;
  Grid grid_;
  std::vector<double> weights_;
  std::vector<double> mutation_;  // b(l_i, lhat_j) row-major
};

/// Convenience form of SelMutSystem::kernel on an n_cells grid.
KernelMatrix kernel_assemble(const SelectionMutationModel& model, const Environment& env, double lambda, int n_cells);

double sm_spectral_bound(const SelMutSystem& system, const Environment& env, double tol = 1e-12);

Density2D sm_eigen_density(const SelMutSystem& system, const Environment& env, double lambda);

LevelFunction selmut_level_function(const SelMutSystem& system);

/// Residuals of a density steady state: renewal ||u(.,0) - B u||_1,
/// transport ||u_a + mu u||_1, environment consistency, r(M_0) and sigma.
Diagnostics verify_selmut(const SelMutSystem& system, const Environment& env, const Density2D& u);

SteadyStateResult reconstruct_selmut(const SelMutSystem& system, const Environment& env_on_curve,
                                     const Density2D& density);

/// Trace + map G + diagonal crossing + reconstruction for the density model.
SolveReport solve_selmut(const SelMutSystem& system, const SolveOptions& options);

}  // namespace popsteady
