#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "popsteady/numerics.hpp"

namespace popsteady {

/// Pair of interaction variables: (J,A), (P,Q) or (S,T) depending on the model.
struct Environment {
  double e1 = 0.0;
  double e2 = 0.0;

  double norm1() const noexcept;
  double norm2() const noexcept;
  friend Environment operator+(Environment a, Environment b) noexcept { return {a.e1 + b.e1, a.e2 + b.e2}; }
  friend Environment operator-(Environment a, Environment b) noexcept { return {a.e1 - b.e1, a.e2 - b.e2}; }
  friend Environment operator*(double c, Environment a) noexcept { return {c * a.e1, c * a.e2}; }
  friend bool operator==(const Environment&, const Environment&) = default;
};

using Profile = GridFn;

/// Rate depending on one structure variable and the environment.
using RateField = std::function<double(double s, const Environment& env)>;
/// Rate depending on age only.
using AgeMap = std::function<double(double a)>;
using ScalarMap = std::function<double(double)>;
/// Mutation kernel b(l, lhat): density in l of offspring of parents with maturation age lhat.
using KernelField = std::function<double(double l, double lhat)>;
/// Rate in (environment, maturation age lhat, age a).
using RateField2 = std::function<double(const Environment& env, double lhat, double a)>;

struct JuvenileAdultModel {
  double l = 1.0;  // maturation size
  double m = 2.0;  // maximal size
  RateField beta;
  RateField mu;
  RateField gamma;
};

struct ConsumerResourceModel {
  double m = 1.0;
  RateField beta;
  RateField mu;
  RateField gamma;
  RateField feeding;
  ScalarMap resource_growth;  // f(Q)
};

struct EarlyHumanModel {
  double a_j = 1.0;
  double a_r = 2.0;
  double a_max = 3.0;
  AgeMap beta;
  AgeMap f_nat;
  AgeMap eta;
  AgeMap mu_sen;
};

struct SelectionMutationModel {
  double a_m = 2.0;
  KernelField mutation_kernel;
  RateField2 beta;
  RateField2 mu;
};

using Model = std::variant<JuvenileAdultModel, ConsumerResourceModel, EarlyHumanModel, SelectionMutationModel>;

std::string model_name(const Model& model);

/// Density on the square [0,a_m]^2; row index is maturation age l, column index age a.
class Density2D {
 public:
  explicit Density2D(Grid grid);
  Density2D(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.size(); }
  double operator()(int i, int k) const noexcept { return values_[static_cast<std::size_t>(i) * size() + k]; }
  double& operator()(int i, int k) noexcept { return values_[static_cast<std::size_t>(i) * size() + k]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Tensor-trapezoid total mass.
double total_mass(const Density2D& u);

Environment environment_ja(const Profile& p, const JuvenileAdultModel& model);
Environment environment_eh(const Profile& p, const EarlyHumanModel& model);
Environment environment_sm(const Density2D& u, const SelectionMutationModel& model);

enum class ViolationKind {
  InvalidStructure,
  NegativeRate,
  GammaNotBoundedAway,
  BetaOutsideSupport,
  BetaTailZero,
  KernelNotDensity,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

/// Checks the model invariants on a lattice of structure points and
/// environments. Violations are data; an empty list means all checks passed.
std::vector<Violation> validate_model(const Model& model);

inline constexpr double kGammaMin = 1e-6;

/// Grid on the model's structure interval with at least `min_cells` cells,
/// rounded up so every break point is a node with an even number of cells
/// between consecutive break points.
Grid structured_grid(const Model& model, int min_cells);

enum class TransportKind { JuvenileAdult, ConsumerResource, EarlyHuman };

/// Common view of the transport-with-renewal models:
///   p_t + (gamma p)_s = -mortality p,  gamma(0) p(0) = ∫_fertile fertility p.
class TransportSystem {
 public:
  /// Throws UnsupportedModel for the selection-mutation model.
  TransportSystem(const Model& model, int min_cells);

  TransportKind kind() const noexcept { return kind_; }
  const Model& model() const noexcept { return model_; }
  const Grid& grid() const noexcept { return grid_; }
  int fertile_first() const noexcept { return fertile_first_; }
  int fertile_last() const noexcept { return fertile_last_; }

  double growth(double s, const Environment& env) const;
  double mortality(double s, const Environment& env) const;
  double fertility(double s, const Environment& env) const;

  /// The model's environmental operator. The consumer-resource model has
  /// no profile-only environment and throws UnsupportedModel.
  Environment environment(const Profile& p) const;

 private:
  Model model_;
  TransportKind kind_;
  Grid grid_;
  int fertile_first_ = 0;
  int fertile_last_ = 0;
};

}  // namespace popsteady
