#include "popsteady/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "popsteady/error.hpp"

namespace popsteady {

CharacteristicFn::CharacteristicFn(const TransportSystem& system, const Environment& env)
    : system_(&system), env_(env) {
  const Grid& grid = system.grid();
  mortality_integral_ = cumulative_midpoint(
      grid, [&](double s) { return system.mortality(s, env) / system.growth(s, env); });
  residence_time_ = cumulative_midpoint(grid, [&](double s) { return 1.0 / system.growth(s, env); });
  for (int k = system.fertile_first(); k <= system.fertile_last(); ++k) {
    const double s = grid.node(k);
    fertility_weight_.push_back(system.fertility(s, env) / system.growth(s, env));
  }
}

double CharacteristicFn::operator()(double lambda) const {
  const int first = system_->fertile_first();
  std::vector<double> integrand(fertility_weight_.size());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    const double w = fertility_weight_[i];
    const std::size_t k = first + i;
    // w == 0 guards 0 * inf when exp overflows for very negative lambda.
    integrand[i] = w == 0.0 ? 0.0 : w * std::exp(-mortality_integral_[k] - lambda * residence_time_[k]);
  }
  return integrate_uniform(system_->grid().step(), integrand);
}

GridFn CharacteristicFn::survival(double lambda) const {
  GridFn out(system_->grid());
  for (int k = 0; k < out.size(); ++k) out[k] = std::exp(-mortality_integral_[k] - lambda * residence_time_[k]);
  return out;
}

std::string_view to_string(SpectralMethod method) {
  return method == SpectralMethod::Characteristic ? "characteristic" : "matrix";
}

GridFn survival(const TransportSystem& system, const Environment& env, double lambda) {
  return CharacteristicFn(system, env).survival(lambda);
}

double characteristic_value(const TransportSystem& system, const Environment& env, double lambda) {
  return CharacteristicFn(system, env)(lambda);
}

int spectral_bound_sign(const TransportSystem& system, const Environment& env) {
  const double k0 = characteristic_value(system, env, 0.0);
  return k0 > 1.0 ? 1 : (k0 < 1.0 ? -1 : 0);
}

SpectralResult spectral_bound(const TransportSystem& system, const Environment& env, double tol) {
  const CharacteristicFn k(system, env);
  SpectralResult out;
  const double k0 = k(0.0);
  out.iterations = 1;
  if (k0 == 1.0) return out;

  double lo = 0.0;
  double hi = 0.0;
  double k_lo = k0;
  double k_hi = k0;
  if (k0 > 1.0) {
    hi = 1.0;
    while ((k_hi = k(hi)) > 1.0) {
      ++out.iterations;
      if (hi >= kSpectralBracketLimit) break;
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = -1.0;
    while ((k_lo = k(lo)) < 1.0) {
      ++out.iterations;
      if (-lo >= kSpectralBracketLimit) break;
      hi = lo;
      lo *= 2.0;
    }
  }
  if (k_lo < 1.0 || k_hi > 1.0) {
    std::ostringstream os;
    os << "K never crosses 1 on the search range: K(" << lo << ") = " << k_lo << ", K(" << hi << ") = " << k_hi
       << " at environment (" << env.e1 << ", " << env.e2 << ")";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  out.bound = bisect_root(
      [&](double lam) {
        ++out.iterations;
        return k(lam) - 1.0;
      },
      lo, hi, tol);
  out.residual = std::abs(k(out.bound) - 1.0);
  return out;
}

Profile eigen_profile(const TransportSystem& system, const Environment& env, double lambda) {
  Profile phi = survival(system, env, lambda);
  const Grid& grid = system.grid();
  const double g0 = system.growth(grid.lower(), env);
  for (int k = 0; k < phi.size(); ++k) phi[k] *= g0 / system.growth(grid.node(k), env);
  const double mass = integrate(phi);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorKind::DegenerateEnvironment, "eigen profile has no finite positive mass");
  for (double& v : phi.values()) v /= mass;
  return phi;
}

namespace {

std::vector<double> fertile_trapezoid_weights(const TransportSystem& system) {
  std::vector<double> w(system.grid().size(), 0.0);
  const double h = system.grid().step();
  const int a = system.fertile_first();
  const int b = system.fertile_last();
  for (int k = a; k <= b; ++k) w[k] = h;
  if (a < b) {
    w[a] = 0.5 * h;
    w[b] = 0.5 * h;
  } else {
    w[a] = 0.0;
  }
  return w;
}

}  // namespace

DenseMatrix assemble_generator_matrix(const TransportSystem& system, const Environment& env) {
  const Grid& grid = system.grid();
  const int n = grid.size();
  const double h = grid.step();
  std::vector<double> gamma(n);
  std::vector<double> mu(n);
  for (int k = 0; k < n; ++k) {
    gamma[k] = system.growth(grid.node(k), env);
    mu[k] = system.mortality(grid.node(k), env);
  }
  const auto w = fertile_trapezoid_weights(system);
  DenseMatrix m(n);
  for (int j = system.fertile_first(); j <= system.fertile_last(); ++j)
    m(0, j) += w[j] * system.fertility(grid.node(j), env) / h;
  m(0, 0) += -gamma[0] / h - mu[0];
  for (int i = 1; i < n; ++i) {
    m(i, i - 1) = gamma[i - 1] / h;
    m(i, i) = -gamma[i] / h - mu[i];
  }
  return m;
}

SpectralResult matrix_spectral_bound(const TransportSystem& system, const Environment& env, double tol) {
  const auto pair = perron_rightmost(assemble_generator_matrix(system, env), tol);
  return {pair.value, pair.residual, pair.iterations, SpectralMethod::Matrix};
}

Profile resolvent_apply(const TransportSystem& system, const Environment& env, double lambda, const Profile& f) {
  const Grid& grid = system.grid();
  if (!(f.grid() == grid)) throw Error(ErrorKind::InvalidArgument, "resolvent argument must live on the system grid");
  const CharacteristicFn k(system, env);
  const GridFn big_f = k.survival(lambda);
  const int n = grid.size();

  GridFn ratio(grid);
  std::vector<double> big_h(n);
  for (int i = 0; i < n; ++i) {
    const double g = system.growth(grid.node(i), env);
    big_h[i] = big_f[i] / g;
    ratio[i] = f[i] / big_f[i];
  }
  const GridFn big_g = cumulative_integral(ratio);

  const int a = system.fertile_first();
  const int b = system.fertile_last();
  std::vector<double> hf(b - a + 1);
  std::vector<double> hfg(b - a + 1);
  for (int i = a; i <= b; ++i) {
    const double s = grid.node(i);
    const double hh = system.fertility(s, env) / system.growth(s, env);
    hf[i - a] = hh * big_f[i];
    hfg[i - a] = hh * big_f[i] * big_g[i];
  }
  const double loop_gain = integrate_uniform(grid.step(), hf);
  if (!(loop_gain < 1.0)) {
    std::ostringstream os;
    os << "∫ h F = " << loop_gain << " >= 1 at lambda = " << lambda;
    throw Error(ErrorKind::ResolventConditionViolated, os.str());
  }
  const double c = integrate_uniform(grid.step(), hfg) / (1.0 - loop_gain);

  Profile out(grid);
  for (int i = 0; i < n; ++i) out[i] = (c + big_g[i]) * big_h[i];
  return out;
}

double resolvent_distance(const TransportSystem& system, const Environment& env1, const Environment& env2,
                          double lambda, int probe_count) {
  if (probe_count < 1) throw Error(ErrorKind::InvalidArgument, "probe_count must be positive");
  const Grid& grid = system.grid();
  const double width = grid.upper() - grid.lower();
  double best = 0.0;
  for (int p = 0; p < probe_count; ++p) {
    Profile f(grid);
    if (p == 0) {
      for (double& v : f.values()) v = 1.0;
    } else {
      const double centre = grid.lower() + width * p / probe_count;
      const double half = width / probe_count;
      for (int k = 0; k < f.size(); ++k) f[k] = std::max(0.0, 1.0 - std::abs(grid.node(k) - centre) / half);
    }
    const double mass = integrate(f);
    for (double& v : f.values()) v /= mass;

    const Profile r1 = resolvent_apply(system, env1, lambda, f);
    const Profile r2 = resolvent_apply(system, env2, lambda, f);
    GridFn diff(grid);
    for (int k = 0; k < diff.size(); ++k) diff[k] = std::abs(r1[k] - r2[k]);
    best = std::max(best, integrate(diff));
  }
  return best;
}

Multiplicity multiplicity(const DenseMatrix& m, double lambda, double rank_tol) {
  const int n = m.order();
  DenseMatrix shifted = m;
  for (int i = 0; i < n; ++i) shifted(i, i) -= lambda;

  auto rank_of = [&](const DenseMatrix& a) {
    const double scale = a.norm_inf();
    return scale > 0.0 ? numerical_rank(a, rank_tol * scale) : 0;
  };

  Multiplicity out;
  out.order = n;
  int rank = rank_of(shifted);
  out.geometric = n - rank;
  DenseMatrix power = shifted;
  for (int k = 2; k <= n && rank > 0; ++k) {
    power = power * shifted;
    const int next = rank_of(power);
    if (next == rank) break;
    rank = next;
  }
  out.algebraic = n - rank;
  return out;
}

Multiplicity multiplicity_diagnostic(const TransportSystem& system, const Environment& env, double lambda,
                                     double rank_tol) {
  return multiplicity(assemble_generator_matrix(system, env), lambda, rank_tol);
}

}  // namespace popsteady
