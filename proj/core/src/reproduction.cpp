#include "popsteady/reproduction.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "popsteady/error.hpp"
#include "popsteady/spectral.hpp"

namespace popsteady {

namespace {

GridFn omega(const TransportSystem& system, const Environment& env) {
  GridFn w = survival(system, env, 0.0);
  const Grid& grid = system.grid();
  const double g0 = system.growth(grid.lower(), env);
  for (int k = 0; k < w.size(); ++k) w[k] *= g0 / system.growth(grid.node(k), env);
  return w;
}

void require_kind(const TransportSystem& system, TransportKind kind, const char* what) {
  if (system.kind() != kind) throw Error(ErrorKind::UnsupportedModel, std::string(what) + " needs a different model kind");
}

}  // namespace

double net_reproduction_ja(const TransportSystem& system, const Environment& env) {
  require_kind(system, TransportKind::JuvenileAdult, "net_reproduction_ja");
  return characteristic_value(system, env, 0.0);
}

double net_reproduction_cr(const TransportSystem& system, const Environment& env) {
  require_kind(system, TransportKind::ConsumerResource, "net_reproduction_cr");
  return characteristic_value(system, env, 0.0);
}

double net_reproduction(const TransportSystem& system, const Environment& env) {
  return characteristic_value(system, env, 0.0);
}

double ja_ratio_residual(const TransportSystem& system, const Environment& env) {
  require_kind(system, TransportKind::JuvenileAdult, "ja_ratio_residual");
  const GridFn w = omega(system, env);
  const int l = system.fertile_first();
  const double n = integrate_range(w, 0, l);
  const double d = integrate_range(w, l, w.size() - 1);
  return env.e1 * d - env.e2 * n;
}

double cr_balance_residual(const TransportSystem& system, const Environment& env) {
  require_kind(system, TransportKind::ConsumerResource, "cr_balance_residual");
  const auto& model = std::get<ConsumerResourceModel>(system.model());
  const GridFn w = omega(system, env);
  GridFn fw(w.grid());
  for (int k = 0; k < w.size(); ++k) fw[k] = model.feeding(w.grid().node(k), env) * w[k];
  const double q = env.e2;
  return env.e1 * integrate(fw) - q * model.resource_growth(q) * integrate(w);
}

LevelFunction reproduction_level_function(const TransportSystem& system) {
  LevelFunction f;
  f.value = [&system](const Environment& e) { return net_reproduction(system, e) - 1.0; };
  f.sign = [&system](const Environment& e) { return spectral_bound_sign(system, e); };
  return f;
}

namespace {

using Residual = double (*)(const TransportSystem&, const Environment&);

struct AngleRoot {
  double theta;
  Environment point;
};

// Curve point on the ray at theta, found with the same ray bracket as the trace.
Environment curve_point(const LevelFunction& sigma, double theta, const ScalarOptions& o) {
  return bracket_on_ray(sigma, theta, o.r_max, o.tol) * ray_direction(theta);
}

AngleRoot refine_on_curve(const TransportSystem& system, const LevelFunction& sigma, Residual residual,
                          const CurveSample& a, const CurveSample& b, const ScalarOptions& o) {
  const double theta = bisect_root(
      [&](double t) { return residual(system, curve_point(sigma, t, o)); }, a.theta, b.theta, 1e-13);
  return {theta, curve_point(sigma, theta, o)};
}

}  // namespace

ScalarSystemResult solve_scalar_system(const TransportSystem& system, const ScalarOptions& options) {
  Residual residual = nullptr;
  if (system.kind() == TransportKind::JuvenileAdult) {
    residual = ja_ratio_residual;
  } else if (system.kind() == TransportKind::ConsumerResource) {
    residual = cr_balance_residual;
  } else {
    throw Error(ErrorKind::UnsupportedModel, "the scalar route needs the juvenile-adult or consumer-resource model");
  }

  const double r0 = net_reproduction(system, {0.0, 0.0});
  if (!(r0 > 1.0)) {
    std::ostringstream os;
    os << "R(0,0) = " << r0 << " <= 1, so the population cannot invade the empty environment";
    throw Error(ErrorKind::HypothesisViolated, os.str());
  }

  const LevelFunction sigma = reproduction_level_function(system);
  TraceOptions trace;
  trace.n_rays = options.n_rays;
  trace.r_max = options.r_max;
  trace.tol = options.tol;
  trace.skip_failed_rays = options.allow_partial_curve;
  LevelCurve curve;
  try {
    curve = trace_zero_set(sigma, trace);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoOuterSignChange || e.kind() == ErrorKind::BadOrigin)
      throw Error(ErrorKind::HypothesisViolated, e.detail());
    throw;
  }

  ScalarSystemResult out;
  if (!curve.skipped_thetas.empty()) {
    std::ostringstream os;
    os << curve.skipped_thetas.size() << " rays have R > 1 up to r_max = " << options.r_max
       << " and were left out of the curve (first at theta = " << curve.skipped_thetas.front() << ")";
    out.warnings.push_back(os.str());
  }

  // Contiguous runs: adjacent samples whose rays were not separated by a skipped ray.
  const double dtheta = std::numbers::pi / 2 / (options.n_rays - 1);
  std::vector<AngleRoot> roots;
  const auto& s = curve.samples;
  std::vector<double> values(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) values[i] = residual(system, s[i].point);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (values[i] == 0.0) {
      roots.push_back({s[i].theta, s[i].point});
      continue;
    }
    if (i + 1 == s.size()) break;
    const bool adjacent = s[i + 1].theta - s[i].theta < 1.5 * dtheta;
    if (adjacent && values[i + 1] != 0.0 && (values[i] > 0) != (values[i + 1] > 0))
      roots.push_back(refine_on_curve(system, sigma, residual, s[i], s[i + 1], options));
  }

  for (const auto& root : roots) {
    const Environment& e = root.point;
    if (e.e1 <= 0.0 || e.e2 <= 0.0) {
      out.boundary_roots.push_back(e);
      continue;
    }
    ScalarSolution sol;
    sol.environment = e;
    sol.r_residual = std::abs(net_reproduction(system, e) - 1.0);
    sol.balance_residual = std::abs(residual(system, e));
    if (system.kind() == TransportKind::ConsumerResource) {
      const auto& model = std::get<ConsumerResourceModel>(system.model());
      if (model.resource_growth(e.e2) < 0.0) {
        sol.negative_resource_growth = true;
        std::ostringstream os;
        os << "root (" << e.e1 << ", " << e.e2 << ") has negative resource growth f(Q) = "
           << model.resource_growth(e.e2);
        out.warnings.push_back(os.str());
      }
    }
    out.solutions.push_back(sol);
  }
  return out;
}

}  // namespace popsteady
