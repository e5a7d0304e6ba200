#pragma once

// Zero level set of a sign-changing function on the positive quadrant,
// traced as a fan of rays from the origin.

#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "popsteady/models.hpp"

namespace popsteady {

/// Function whose zero set is traced. `sign` is optional; when given it
/// must agree with the sign of `value` and is used for the ray scans, which
/// never need magnitudes.
struct LevelFunction {
  std::function<double(const Environment&)> value;
  std::function<int(const Environment&)> sign;

  int sign_at(const Environment& e) const;
};

/// Unit direction (cos theta, sin theta), exact on the two axes.
Environment ray_direction(double theta);

/// Coordinate t of the projection (1-t, t) onto the unit simplex.
double simplex_coordinate(const Environment& e);
/// Angle of the ray through the simplex point (1-t, t).
double simplex_angle(double t);

inline constexpr int kRayScanSteps = 64;

/// Innermost root radius of sigma along the ray at angle theta: scans in
/// steps r_max/64 and bisects the first sign-change cell to tol.
/// Throws BadOrigin if sigma(0) <= 0, NoOuterSignChange if sigma(r_max dir) >= 0.
double bracket_on_ray(const LevelFunction& sigma, double theta, double r_max, double tol = 1e-10);

/// Every sign change along the ray at the scan resolution, innermost first.
std::vector<double> roots_on_ray(const LevelFunction& sigma, double theta, double r_max, double tol = 1e-10);

struct CurveSample {
  double theta = 0.0;
  double rho = 0.0;
  Environment point;
  double sigma_residual = 0.0;
  bool degenerate = false;  // sigma vanished on a whole scan cell
};

struct LevelCurve {
  std::vector<CurveSample> samples;
  /// Rays skipped because no sign change was found (only with skip_failed_rays).
  std::vector<double> skipped_thetas;
};

struct TraceOptions {
  int n_rays = 257;
  double r_max = 10.0;
  double tol = 1e-10;
  /// Index of the root taken on every ray; 0 is the innermost branch.
  int branch = 0;
  /// Keep going past rays without a sign change instead of failing.
  bool skip_failed_rays = false;
};

/// Samples on rays theta_i = i/(n_rays-1) * pi/2, so the first and last
/// samples lie on the e1 and e2 axes.
LevelCurve trace_zero_set(const LevelFunction& sigma, const TraceOptions& options);

/// Number of roots on every ray; branch b exists when each ray has more than b roots.
int count_branches(const LevelFunction& sigma, const TraceOptions& options);

/// Point of the curve on the ray through `point`, interpolating rho
/// linearly in theta between samples.
Environment project_to_curve(const Environment& point, const LevelCurve& curve);

}  // namespace popsteady
