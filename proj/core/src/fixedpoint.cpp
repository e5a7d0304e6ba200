#include "popsteady/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "popsteady/error.hpp"
#include "popsteady/reproduction.hpp"

namespace popsteady {

bool Diagnostics::passes(double tol) const {
  auto ok = [tol](double v) { return std::isfinite(v) && std::abs(v) <= tol; };
  return positive && ok(sigma_at_env) && ok(env_consistency) && ok(boundary_residual) && ok(r_value - 1.0) &&
         std::isfinite(ode_residual) && ode_residual <= 10.0 * step &&
         (!resource_residual || ok(*resource_residual)) && (!renewal_residual || ok(*renewal_residual));
}

LevelFunction spectral_level_function(const TransportSystem& system) {
  LevelFunction f;
  f.value = [&system](const Environment& e) { return spectral_bound(system, e).bound; };
  f.sign = [&system](const Environment& e) { return spectral_bound_sign(system, e); };
  return f;
}

namespace {

double environment_coordinate(const TransportSystem& system, const Environment& point) {
  const Profile phi = eigen_profile(system, point, 0.0);
  const Environment e = system.environment(phi);
  if (!(e.e1 + e.e2 > 0.0))
    throw Error(ErrorKind::DegenerateEnvironment, "the environment of a positive eigen profile vanished");
  return simplex_coordinate(e);
}

double angle_of(const Environment& e) { return std::atan2(e.e2, e.e1); }

}  // namespace

double map_G(const TransportSystem& system, const LevelFunction& sigma, double theta, double r_max, double tol) {
  const Environment point = bracket_on_ray(sigma, theta, r_max, tol) * ray_direction(theta);
  return environment_coordinate(system, point);
}

double map_G(const TransportSystem& system, const LevelCurve& curve, double theta) {
  return environment_coordinate(system, project_to_curve(ray_direction(theta), curve));
}

std::vector<Crossing> find_diagonal_crossings(const CrossingSample& samples,
                                              const std::function<double(double)>& refine, double tol) {
  const auto& t = samples.t;
  const auto& g = samples.g;
  if (t.size() != g.size() || t.empty()) throw Error(ErrorKind::InvalidArgument, "crossing samples are empty or ragged");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw Error(ErrorKind::InvalidArgument, "crossing sample coordinates must increase");

  const std::size_t n = t.size();
  std::vector<double> d(n);
  std::vector<bool> zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = g[i] - t[i];
    zero[i] = std::abs(d[i]) <= tol;
  }
  auto is_boundary = [](double x) { return x <= 0.0 || x >= 1.0; };

  std::vector<Crossing> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (zero[i]) {
      out.push_back({t[i], is_boundary(t[i])});
      continue;
    }
    if (i + 1 < n && !zero[i + 1] && (d[i] > 0) != (d[i + 1] > 0)) {
      const double root = bisect_root([&](double x) { return refine(x) - x; }, t[i], t[i + 1], tol);
      out.push_back({root, is_boundary(root)});
    }
  }
  return out;
}

Crossing find_diagonal_crossing(const CrossingSample& samples, const std::function<double(double)>& refine,
                                double tol) {
  const auto all = find_diagonal_crossings(samples, refine, tol);
  for (const auto& c : all)
    if (!c.boundary) return c;
  if (!all.empty()) return all.front();
  std::ostringstream os;
  os << "g(t) - t keeps one sign on all " << samples.t.size() << " samples; t,g:";
  for (std::size_t i = 0; i < samples.t.size(); ++i) os << ' ' << samples.t[i] << ',' << samples.g[i];
  throw Error(ErrorKind::NoCrossing, os.str());
}

void check_spectral_hypotheses(const TransportSystem& system, double r_max) {
  if (spectral_bound_sign(system, {0.0, 0.0}) <= 0) {
    std::ostringstream os;
    os << "spectral bound at the empty environment is " << spectral_bound(system, {0.0, 0.0}).bound
       << ", not positive (R(0,0) = " << net_reproduction(system, {0.0, 0.0}) << ")";
    throw Error(ErrorKind::HypothesisViolated, os.str());
  }
  for (const Environment far : {Environment{r_max, 0.0}, Environment{0.0, r_max}}) {
    if (spectral_bound_sign(system, far) >= 0) {
      std::ostringstream os;
      os << "spectral bound at (" << far.e1 << ", " << far.e2 << ") is not negative; increase r_max";
      throw Error(ErrorKind::HypothesisViolated, os.str());
    }
  }
}

namespace {

Environment branch_point(const LevelFunction& sigma, double theta, int branch, const SolveOptions& o) {
  if (branch == 0) return bracket_on_ray(sigma, theta, o.r_max, o.tol) * ray_direction(theta);
  const auto roots = roots_on_ray(sigma, theta, o.r_max, o.tol);
  if (static_cast<int>(roots.size()) <= branch) {
    std::ostringstream os;
    os << "branch " << branch << " is missing on the ray theta = " << theta;
    throw Error(ErrorKind::NoOuterSignChange, os.str());
  }
  return roots[branch] * ray_direction(theta);
}

void check_multiplicity(const TransportSystem& system, SteadyStateResult& result, const SolveOptions& o) {
  const TransportSystem coarse(system.model(), o.multiplicity_cells);
  const DenseMatrix m = assemble_generator_matrix(coarse, result.environment);
  const double lambda = perron_rightmost(m).value;
  const Multiplicity mult = multiplicity(m, lambda, o.rank_tol);
  result.multiplicity = mult;
  std::ostringstream os;
  os << "spectral bound " << lambda << " of the " << mult.order << "-point upwind matrix has geometric multiplicity "
     << mult.geometric << " and algebraic multiplicity " << mult.algebraic;
  if (mult.geometric > 1) throw Error(ErrorKind::HypothesisViolated, os.str() + "; the monotone route needs 1");
  if (mult.algebraic > 1) result.warnings.push_back(os.str());
}

}  // namespace

SolveReport solve_steady_state(const TransportSystem& system, SolveMethod method, const SolveOptions& options) {
  if (system.kind() == TransportKind::ConsumerResource)
    throw Error(ErrorKind::UnsupportedModel,
                "the consumer-resource operator family is not a positive semigroup; use the scalar route");
  check_spectral_hypotheses(system, options.r_max);
  const LevelFunction sigma = spectral_level_function(system);

  TraceOptions trace;
  trace.n_rays = options.n_rays;
  trace.r_max = options.r_max;
  trace.tol = options.tol;
  int branches = 1;
  if (options.all_branches) branches = std::max(1, count_branches(sigma, trace));

  SolveReport report;
  std::vector<SteadyStateResult> boundary;
  for (int b = 0; b < branches; ++b) {
    trace.branch = b;
    LevelCurve curve;
    try {
      curve = trace_zero_set(sigma, trace);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoOuterSignChange || e.kind() == ErrorKind::BadOrigin)
        throw Error(ErrorKind::HypothesisViolated, e.detail());
      throw;
    }
    CrossingSample samples;
    for (const auto& s : curve.samples) {
      samples.t.push_back(simplex_coordinate(s.point));
      samples.g.push_back(environment_coordinate(system, s.point));
    }
    auto refine = [&](double t) {
      return environment_coordinate(system, branch_point(sigma, simplex_angle(t), b, options));
    };
    const auto crossings = find_diagonal_crossings(samples, refine, options.crossing_tol);
    for (const auto& c : crossings) {
      const Environment env = branch_point(sigma, simplex_angle(c.t), b, options);
      SteadyStateResult r = steady_state_from_environment(system, env);
      r.boundary = c.boundary || env.e1 <= 0.0 || env.e2 <= 0.0;
      if (method == SolveMethod::Monotone) check_multiplicity(system, r, options);
      if (b > 0) r.warnings.push_back("found on level-curve branch " + std::to_string(b));
      (r.boundary ? boundary : report.solutions).push_back(std::move(r));
    }
    if (b == 0) {
      report.curve = std::move(curve);
      report.samples = std::move(samples);
    }
  }
  for (auto& r : boundary) report.solutions.push_back(std::move(r));
  if (report.solutions.empty()) {
    std::ostringstream os;
    os << "no diagonal crossing on " << report.samples.t.size() << " curve samples";
    throw Error(ErrorKind::NoCrossing, os.str());
  }
  return report;
}

SteadyStateResult reconstruct_steady_state(const TransportSystem& system, const Environment& env_on_curve,
                                           const Profile& profile) {
  const Environment e = system.environment(profile);
  const double angle = std::abs(angle_of(e) - angle_of(env_on_curve));
  if (!(e.norm1() > 0.0) || angle > 1e-6) {
    std::ostringstream os;
    os << "E(profile) = (" << e.e1 << ", " << e.e2 << ") and the curve point (" << env_on_curve.e1 << ", "
       << env_on_curve.e2 << ") differ in direction by " << angle << " rad";
    throw Error(ErrorKind::NotParallel, os.str());
  }
  SteadyStateResult out;
  out.environment = env_on_curve;
  out.scale = env_on_curve.norm1() / e.norm1();
  Profile p = profile;
  for (double& v : p.values()) v *= out.scale;
  out.diagnostics = verify_steady_state(system, env_on_curve, p);
  out.profile = std::move(p);
  out.boundary = env_on_curve.e1 <= 0.0 || env_on_curve.e2 <= 0.0;
  return out;
}

SteadyStateResult steady_state_from_environment(const TransportSystem& system, const Environment& env) {
  const Profile phi = eigen_profile(system, env, 0.0);
  if (system.kind() != TransportKind::ConsumerResource) return reconstruct_steady_state(system, env, phi);
  SteadyStateResult out;
  out.environment = env;
  out.scale = env.e1;  // phi has unit mass and P = ∫ p
  Profile p = phi;
  for (double& v : p.values()) v *= out.scale;
  out.diagnostics = verify_steady_state(system, env, p);
  out.profile = std::move(p);
  out.boundary = env.e1 <= 0.0 || env.e2 <= 0.0;
  return out;
}

Diagnostics verify_steady_state(const TransportSystem& system, const Environment& env, const Profile& p) {
  const Grid& grid = system.grid();
  if (!(p.grid() == grid)) throw Error(ErrorKind::GridMisaligned, "profile grid differs from the system grid");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double h = grid.step();
  const int n = grid.size();

  Diagnostics d;
  d.step = h;
  const double mass = integrate(p);
  d.positive = mass > 0.0 && std::all_of(p.values().begin(), p.values().end(), [](double v) { return v >= 0.0; });

  if (system.kind() == TransportKind::ConsumerResource) {
    const auto& model = std::get<ConsumerResourceModel>(system.model());
    d.env_consistency = std::abs(mass - env.e1);
    GridFn fp(grid);
    for (int k = 0; k < n; ++k) fp[k] = model.feeding(grid.node(k), env) * p[k];
    d.resource_residual = std::abs(env.e2 * model.resource_growth(env.e2) - integrate(fp));
  } else {
    d.env_consistency = (system.environment(p) - env).norm1();
  }

  std::vector<double> births(system.fertile_last() - system.fertile_first() + 1);
  for (int k = system.fertile_first(); k <= system.fertile_last(); ++k)
    births[k - system.fertile_first()] = system.fertility(grid.node(k), env) * p[k];
  d.boundary_residual = std::abs(system.growth(grid.lower(), env) * p[0] - integrate_uniform(h, births));

  std::vector<double> flux(n);
  for (int k = 0; k < n; ++k) flux[k] = system.growth(grid.node(k), env) * p[k];
  std::vector<double> res(n);
  for (int k = 0; k < n; ++k) {
    double deriv = 0.0;
    if (k == 0) {
      deriv = (flux[1] - flux[0]) / h;
    } else if (k == n - 1) {
      deriv = (flux[k] - flux[k - 1]) / h;
    } else {
      deriv = (flux[k + 1] - flux[k - 1]) / (2.0 * h);
    }
    res[k] = std::abs(deriv + system.mortality(grid.node(k), env) * p[k]);
  }
  d.ode_residual = trapezoid_uniform(h, res);

  d.r_value = net_reproduction(system, env);
  try {
    d.sigma_at_env = spectral_bound(system, env).bound;
  } catch (const Error&) {
    d.sigma_at_env = nan;
  }
  return d;
}

SteadyStateResult solve_state_space(const TransportSystem& system, const Profile& init,
                                    const StateSpaceOptions& options) {
  if (system.kind() == TransportKind::ConsumerResource)
    throw Error(ErrorKind::UnsupportedModel, "the state-space iteration needs a profile-only environment");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "damping must lie in (0, 1]");
  if (!(init.grid() == system.grid())) throw Error(ErrorKind::GridMisaligned, "initial profile grid differs");
  const double mass = integrate(init);
  if (!(mass > 0.0) || std::any_of(init.values().begin(), init.values().end(), [](double v) { return v < 0.0; }))
    throw Error(ErrorKind::HypothesisViolated, "the initial profile must be nonnegative with positive mass");

  const LevelFunction sigma = spectral_level_function(system);
  auto level_point = [&](const Profile& x) {
    const Environment e = system.environment(x);
    if (!(e.norm1() > 0.0)) throw Error(ErrorKind::HypothesisViolated, "the iterate has a zero environment");
    const double theta = angle_of(e);
    try {
      return bracket_on_ray(sigma, theta, options.r_max, options.ray_tol) * ray_direction(theta);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::NoOuterSignChange || err.kind() == ErrorKind::BadOrigin)
        throw Error(ErrorKind::HypothesisViolated, err.detail());
      throw;
    }
  };

  Profile x = init;
  for (double& v : x.values()) v /= mass;
  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < options.max_iter) {
    ++it;
    const Profile phi = eigen_profile(system, level_point(x), 0.0);
    Profile next(system.grid());
    for (int k = 0; k < next.size(); ++k) next[k] = (1.0 - options.damping) * x[k] + options.damping * phi[k];
    const double m = integrate(next);
    for (double& v : next.values()) v /= m;
    GridFn diff(system.grid());
    for (int k = 0; k < diff.size(); ++k) diff[k] = std::abs(next[k] - x[k]);
    change = integrate(diff);
    x = std::move(next);
    if (change <= options.tol) break;
  }
  if (!(change <= options.tol)) {
    std::ostringstream os;
    os << "state-space iteration stopped after " << it << " steps with L1 change " << change;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  SteadyStateResult out = reconstruct_steady_state(system, level_point(x), x);
  out.iterations = it;
  return out;
}

FixedRay fixed_ray(const LinearMap& map, int dimension, double tol, int max_iter) {
  if (dimension < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  std::vector<double> x(dimension, 1.0 / dimension);
  for (int it = 1; it <= max_iter; ++it) {
    const std::vector<double> y = map(x);
    double norm = 0.0;
    for (double v : y) {
      if (v < 0.0) throw Error(ErrorKind::InvalidArgument, "the operator does not preserve the nonnegative cone");
      norm += v;
    }
    if (!(norm > 0.0)) {
      std::ostringstream os;
      os << "iterate " << it << " is mapped to zero; the operator is not strictly positive";
      throw Error(ErrorKind::StrictPositivityFailure, os.str());
    }
    double residual = 0.0;
    for (int i = 0; i < dimension; ++i) residual += std::abs(y[i] - norm * x[i]);
    if (residual <= tol * std::min(1.0, norm)) {
      if (norm <= tol) {
        std::ostringstream os;
        os << "iteration collapses to eigenvalue " << norm << "; the operator is not strictly positive";
        throw Error(ErrorKind::StrictPositivityFailure, os.str());
      }
      return {norm, x, it, residual};
    }
    double total = 0.0;
    for (int i = 0; i < dimension; ++i) {
      x[i] = 0.5 * (x[i] + y[i] / norm);
      total += x[i];
    }
    for (double& v : x) v /= total;
  }
  std::ostringstream os;
  os << "fixed-ray iteration did not converge in " << max_iter << " steps";
  throw Error(ErrorKind::NoConvergence, os.str());
}

FixedRay fixed_ray(const DenseMatrix& m, double tol, int max_iter) {
  const int n = m.order();
  for (int j = 0; j < n; ++j) {
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      if (m(i, j) < 0.0) throw Error(ErrorKind::InvalidArgument, "the matrix has a negative entry");
      nonzero = nonzero || m(i, j) > 0.0;
    }
    if (!nonzero) {
      std::ostringstream os;
      os << "column " << j << " is zero, so L e_" << j << " = 0 and L is not strictly positive";
      throw Error(ErrorKind::StrictPositivityFailure, os.str());
    }
  }
  return fixed_ray([&m](const std::vector<double>& x) { return m * std::span<const double>(x); }, n, tol, max_iter);
}

}  // namespace popsteady
