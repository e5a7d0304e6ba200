#include "popsteady/selmut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "popsteady/error.hpp"
#include "popsteady/spectral.hpp"

namespace popsteady {

namespace {

std::vector<double> trapezoid_weights(const Grid& grid) {
  std::vector<double> w(grid.size(), grid.step());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double weighted_l1(const std::vector<double>& w, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::abs(v[i]);
  return s;
}

}  // namespace

double weighted_norm(const KernelMatrix& k) {
  const int n = k.matrix.order();
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    if (k.weights[j] <= 0.0) continue;
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += k.weights[i] * k.matrix(i, j);
    best = std::max(best, col / k.weights[j]);
  }
  return best;
}

KernelRadius kernel_spectral_radius(const KernelMatrix& k, double tol, int max_iter) {
  const int n = k.matrix.order();
  std::vector<double> v(n, 1.0);
  const double seed = weighted_l1(k.weights, v);
  for (double& x : v) x /= seed;
  std::vector<double> y(n);
  KernelRadius out{0.0, MaturityFn(k.grid), false, 0};
  for (int it = 1; it <= max_iter; ++it) {
    k.matrix.multiply(v, y);
    const double r = weighted_l1(k.weights, y);
    out.iterations = it;
    if (!(r > 0.0)) {
      out.zero = true;
      std::copy(v.begin(), v.end(), out.eigen.values().begin());
      return out;
    }
    double res = 0.0;
    for (int i = 0; i < n; ++i) res += k.weights[i] * std::abs(y[i] - r * v[i]);
    for (int i = 0; i < n; ++i) v[i] = y[i] / r;
    if (res <= tol * r) {
      out.radius = r;
      std::copy(v.begin(), v.end(), out.eigen.values().begin());
      return out;
    }
  }
  std::ostringstream os;
  os << "kernel power iteration did not converge in " << max_iter << " steps";
  throw Error(ErrorKind::NoConvergence, os.str());
}

SelMutSystem::SelMutSystem(SelectionMutationModel model, int n_cells)
    : model_(std::move(model)), grid_(structured_grid(model_, n_cells)), weights_(trapezoid_weights(grid_)) {
  const int n = grid_.size();
  mutation_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mutation_[static_cast<std::size_t>(i) * n + j] = model_.mutation_kernel(grid_.node(i), grid_.node(j));
}

SelMutSystem::Fertility SelMutSystem::fertility(const Environment& env) const {
  const int n = grid_.size();
  Fertility f;
  f.mass.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double lhat = grid_.node(j);
    const auto cum = cumulative_midpoint(grid_, [&](double r) { return model_.mu(env, lhat, r); });
    for (int k = j; k < n; ++k)
      f.mass[static_cast<std::size_t>(j) * n + k] = model_.beta(env, lhat, grid_.node(k)) * std::exp(-cum[k]);
  }
  return f;
}

KernelMatrix SelMutSystem::assemble(const Fertility& f, double lambda) const {
  const int n = grid_.size();
  const double h = grid_.step();
  // Per cell, the fertility mass is interpolated linearly and multiplied by
  // the exact exp(-lambda a); at lambda = 0 this is the trapezoid rule.
  const double z = lambda * h;
  double left = 0.5, right = 0.5;
  if (std::abs(z) > 1e-4) {
    const double ez = std::exp(-z);
    right = (1.0 - ez * (1.0 + z)) / (z * z);
    left = (1.0 - ez) / z - right;
  } else {
    right = 0.5 - z / 3.0 + z * z / 8.0;
    left = 0.5 - z / 6.0 + z * z / 24.0;
  }
  std::vector<double> inner(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double* m = f.mass.data() + static_cast<std::size_t>(j) * n;
    double sum = 0.0;
    for (int k = j; k + 1 < n; ++k) sum += std::exp(-lambda * grid_.node(k)) * (left * m[k] + right * m[k + 1]);
    inner[j] = h * sum;
  }
  KernelMatrix out{grid_, weights_, DenseMatrix(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.matrix(i, j) = weights_[j] * mutation_[static_cast<std::size_t>(i) * n + j] * inner[j];
  return out;
}

KernelMatrix SelMutSystem::kernel(const Environment& env, double lambda) const {
  return assemble(fertility(env), lambda);
}

double SelMutSystem::radius(const Environment& env, double lambda) const {
  return kernel_spectral_radius(kernel(env, lambda)).radius;
}

int SelMutSystem::spectral_bound_sign(const Environment& env) const {
  const double r = radius(env, 0.0);
  return r > 1.0 ? 1 : (r < 1.0 ? -1 : 0);
}

double SelMutSystem::spectral_bound(const Environment& env, double tol) const {
  const Fertility f = fertility(env);
  auto r = [&](double lambda) { return kernel_spectral_radius(assemble(f, lambda)).radius; };
  const double r0 = r(0.0);
  if (r0 == 1.0) return 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double r_lo = r0;
  double r_hi = r0;
  if (r0 > 1.0) {
    hi = 1.0;
    while ((r_hi = r(hi)) > 1.0 && hi < kSpectralBracketLimit) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = -1.0;
    while ((r_lo = r(lo)) < 1.0 && -lo < kSpectralBracketLimit) {
      hi = lo;
      lo *= 2.0;
    }
  }
  if (r_lo < 1.0 || r_hi > 1.0) {
    std::ostringstream os;
    os << "r(M_lambda) never crosses 1: r(" << lo << ") = " << r_lo << ", r(" << hi << ") = " << r_hi
       << " at environment (" << env.e1 << ", " << env.e2 << ")";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  return bisect_root([&](double lambda) { return r(lambda) - 1.0; }, lo, hi, tol);
}

Density2D SelMutSystem::eigen_density(const Environment& env, double lambda) const {
  const KernelRadius kr = kernel_spectral_radius(kernel(env, lambda));
  const int n = grid_.size();
  Density2D u(grid_);
  for (int i = 0; i < n; ++i) {
    const double l = grid_.node(i);
    const auto cum = cumulative_midpoint(grid_, [&](double r) { return model_.mu(env, l, r); });
    for (int k = 0; k < n; ++k) u(i, k) = kr.eigen[i] * std::exp(-cum[k] - lambda * grid_.node(k));
  }
  const double mass = total_mass(u);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorKind::DegenerateEnvironment, "eigen density has no finite positive mass");
  for (double& v : u.values()) v /= mass;
  return u;
}

bool SelMutSystem::kernel_strictly_positive(const Environment& env) const {
  const KernelMatrix k = kernel(env, 0.0);
  const int n = k.matrix.order();
  const double scale = k.matrix.norm_inf();
  const double floor = 1e-14 * scale;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    double col = 0.0;
    for (int j = 0; j < n; ++j) {
      row += k.matrix(i, j);
      if (k.weights[j] > 0.0) col += k.matrix(j, i) / k.weights[i];
    }
    // The last column carries no newborns: its inner age integral is empty.
    if (row <= floor || (i + 1 < n && col <= floor)) return false;
  }
  return true;
}

KernelMatrix kernel_assemble(const SelectionMutationModel& model, const Environment& env, double lambda, int n_cells) {
  return SelMutSystem(model, n_cells).kernel(env, lambda);
}

double sm_spectral_bound(const SelMutSystem& system, const Environment& env, double tol) {
  return system.spectral_bound(env, tol);
}

Density2D sm_eigen_density(const SelMutSystem& system, const Environment& env, double lambda) {
  return system.eigen_density(env, lambda);
}

LevelFunction selmut_level_function(const SelMutSystem& system) {
  LevelFunction f;
  f.value = [&system](const Environment& e) { return system.spectral_bound(e); };
  f.sign = [&system](const Environment& e) { return system.spectral_bound_sign(e); };
  return f;
}

Diagnostics verify_selmut(const SelMutSystem& system, const Environment& env, const Density2D& u) {
  const Grid& grid = system.grid();
  if (!(u.grid() == grid)) throw Error(ErrorKind::GridMisaligned, "density grid differs from the system grid");
  const auto& model = system.model();
  const auto& w = system.weights();
  const int n = grid.size();
  const double h = grid.step();

  Diagnostics d;
  d.step = h;
  d.positive = total_mass(u) > 0.0 && std::all_of(u.values().begin(), u.values().end(), [](double v) { return v >= 0.0; });
  d.env_consistency = (system.environment(u) - env).norm1();

  // Newborns B(u)(l_i) = sum_j w_j b(l_i, lhat_j) ∫_lhat_j^a_m beta u(j, a) da.
  std::vector<double> births(n);
  std::vector<double> row(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) row[k] = model.beta(env, grid.node(j), grid.node(k)) * u(j, k);
    births[j] = trapezoid_uniform(h, std::span<const double>(row).subspan(j));
  }
  std::vector<double> renewal(n);
  for (int i = 0; i < n; ++i) {
    double b = 0.0;
    for (int j = 0; j < n; ++j) b += w[j] * model.mutation_kernel(grid.node(i), grid.node(j)) * births[j];
    renewal[i] = u(i, 0) - b;
  }
  d.boundary_residual = weighted_l1(w, renewal);

  const KernelMatrix m0 = system.kernel(env, 0.0);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = u(i, 0);
  const std::vector<double> mv = m0.matrix * std::span<const double>(v);
  for (int i = 0; i < n; ++i) v[i] -= mv[i];
  d.renewal_residual = weighted_l1(w, v);

  std::vector<double> row_res(n);
  std::vector<double> res(n);
  for (int i = 0; i < n; ++i) {
    const double l = grid.node(i);
    for (int k = 0; k < n; ++k) {
      double deriv = 0.0;
      if (k == 0) {
        deriv = (u(i, 1) - u(i, 0)) / h;
      } else if (k == n - 1) {
        deriv = (u(i, k) - u(i, k - 1)) / h;
      } else {
        deriv = (u(i, k + 1) - u(i, k - 1)) / (2.0 * h);
      }
      res[k] = std::abs(deriv + model.mu(env, l, grid.node(k)) * u(i, k));
    }
    row_res[i] = trapezoid_uniform(h, res);
  }
  d.ode_residual = trapezoid_uniform(h, row_res);

  d.r_value = kernel_spectral_radius(m0).radius;
  try {
    d.sigma_at_env = system.spectral_bound(env);
  } catch (const Error&) {
    d.sigma_at_env = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

SteadyStateResult reconstruct_selmut(const SelMutSystem& system, const Environment& env_on_curve,
                                     const Density2D& density) {
  const Environment e = system.environment(density);
  const double angle = std::abs(std::atan2(e.e2, e.e1) - std::atan2(env_on_curve.e2, env_on_curve.e1));
  if (!(e.norm1() > 0.0) || angle > 1e-6) {
    std::ostringstream os;
    os << "E(density) = (" << e.e1 << ", " << e.e2 << ") and the curve point (" << env_on_curve.e1 << ", "
       << env_on_curve.e2 << ") differ in direction by " << angle << " rad";
    throw Error(ErrorKind::NotParallel, os.str());
  }
  SteadyStateResult out;
  out.environment = env_on_curve;
  out.scale = env_on_curve.norm1() / e.norm1();
  Density2D u = density;
  for (double& v : u.values()) v *= out.scale;
  out.diagnostics = verify_selmut(system, env_on_curve, u);
  out.profile = std::move(u);
  out.boundary = env_on_curve.e1 <= 0.0 || env_on_curve.e2 <= 0.0;
  return out;
}

SolveReport solve_selmut(const SelMutSystem& system, const SolveOptions& options) {
  const Environment origin{0.0, 0.0};
  if (system.spectral_bound_sign(origin) <= 0) {
    std::ostringstream os;
    os << "r(M_0) = " << system.radius(origin, 0.0) << " <= 1 at the empty environment";
    throw Error(ErrorKind::HypothesisViolated, os.str());
  }
  for (const Environment far : {Environment{options.r_max, 0.0}, Environment{0.0, options.r_max}}) {
    if (system.spectral_bound_sign(far) >= 0) {
      std::ostringstream os;
      os << "r(M_0) = " << system.radius(far, 0.0) << " >= 1 at (" << far.e1 << ", " << far.e2
         << "); increase r_max";
      throw Error(ErrorKind::HypothesisViolated, os.str());
    }
  }

  const LevelFunction sigma = selmut_level_function(system);
  TraceOptions trace;
  trace.n_rays = options.n_rays;
  trace.r_max = options.r_max;
  trace.tol = options.tol;
  SolveReport report;
  try {
    report.curve = trace_zero_set(sigma, trace);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoOuterSignChange || e.kind() == ErrorKind::BadOrigin)
      throw Error(ErrorKind::HypothesisViolated, e.detail());
    throw;
  }

  auto coordinate = [&](const Environment& point) {
    const Environment e = system.environment(system.eigen_density(point, 0.0));
    if (!(e.norm1() > 0.0)) throw Error(ErrorKind::DegenerateEnvironment, "eigen density has a zero environment");
    return simplex_coordinate(e);
  };
  auto point_at = [&](double theta) {
    return bracket_on_ray(sigma, theta, options.r_max, options.tol) * ray_direction(theta);
  };
  for (const auto& s : report.curve.samples) {
    report.samples.t.push_back(simplex_coordinate(s.point));
    report.samples.g.push_back(coordinate(s.point));
  }
  const auto crossings = find_diagonal_crossings(
      report.samples, [&](double t) { return coordinate(point_at(simplex_angle(t))); }, options.crossing_tol);

  std::vector<SteadyStateResult> boundary;
  for (const auto& c : crossings) {
    const Environment env = point_at(simplex_angle(c.t));
    SteadyStateResult r = reconstruct_selmut(system, env, system.eigen_density(env, 0.0));
    r.boundary = r.boundary || c.boundary;
    if (!system.kernel_strictly_positive(env))
      r.warnings.push_back("the recruitment kernel is not strictly positive at the solution; irreducibility is not guaranteed");
    (r.boundary ? boundary : report.solutions).push_back(std::move(r));
  }
  for (auto& r : boundary) report.solutions.push_back(std::move(r));
  if (report.solutions.empty()) throw Error(ErrorKind::NoCrossing, "no diagonal crossing on the traced curve");
  return report;
}

}  // namespace popsteady
