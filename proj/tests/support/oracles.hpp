#pragma once

// Closed forms and brute-force reference values used as test oracles, plus
// small deterministic generators. Nothing here calls into the library's
// numerical code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "popsteady/models.hpp"

namespace oracle {

using popsteady::Environment;

/// Plain bisection on a sign change; independent of the library's root finder.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int steps = 200) {
  double flo = f(lo);
  for (int i = 0; i < steps && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// (e^{-a x} - e^{-b x}) / x with the limit b - a at x = 0.
inline double exp_window(double a, double b, double x) {
  if (std::abs(x) < 1e-12) return b - a;
  return (std::exp(-a * x) - std::exp(-b * x)) / x;
}

// Juvenile-adult model with constant rates: beta = b0/(1+J+A) on [l,m],
// mu = mu0, gamma = g0.
struct ConstJA {
  double l = 1.0, m = 2.0, b0 = 3.0, mu0 = 0.0, g0 = 1.0;

  double beta(const Environment& e) const { return b0 / (1.0 + e.e1 + e.e2); }
  /// K(lambda) = (beta/g0) ∫_l^m exp(-(lambda+mu0) s / g0) ds.
  double K(const Environment& e, double lambda) const {
    return beta(e) / g0 * exp_window(l, m, (lambda + mu0) / g0);
  }
  double R(const Environment& e) const { return K(e, 0.0); }
  double bound(const Environment& e) const {
    return bisect([&](double x) { return K(e, x) - 1.0; }, -50.0, 50.0);
  }

  popsteady::Model model() const {
    const ConstJA c = *this;
    popsteady::JuvenileAdultModel md;
    md.l = l;
    md.m = m;
    md.beta = [c](double s, const Environment& e) { return (s >= c.l && s <= c.m) ? c.beta(e) : 0.0; };
    md.mu = [c](double, const Environment&) { return c.mu0; };
    md.gamma = [c](double, const Environment&) { return c.g0; };
    return md;
  }
};

/// JA-CONST at (0,0) with lambda: root of 3(e^{-x} - e^{-2x}) = x.
inline double ja_const_origin_bound() {
  return bisect([](double x) { return 3.0 * (std::exp(-x) - std::exp(-2.0 * x)) - x; }, 0.1, 2.0);
}

/// Resolvent of the density-free JA-CONST rates (beta = 3 on [1,2]) at
/// lambda = 1 applied to f = 1: (c + e^s - 1) e^{-s}.
inline double resolvent_constant() {
  const double w = std::exp(-1.0) - std::exp(-2.0);
  return 3.0 * (1.0 - w) / (1.0 - 3.0 * w);
}
inline double resolvent_value(double s) { return (resolvent_constant() + std::exp(s) - 1.0) * std::exp(-s); }

// Consumer-resource CR-CONST: m = 1, gamma = 1, mu = 0, beta = 3/(1+P),
// F = 1, f(Q) = 3 - Q.
inline popsteady::Model cr_const() {
  popsteady::ConsumerResourceModel md;
  md.m = 1.0;
  md.beta = [](double, const Environment& e) { return 3.0 / (1.0 + e.e1); };
  md.mu = [](double, const Environment&) { return 0.0; };
  md.gamma = [](double, const Environment&) { return 1.0; };
  md.feeding = [](double, const Environment&) { return 1.0; };
  md.resource_growth = [](double q) { return 3.0 - q; };
  return md;
}

// Early-human EH-CONST: a_j = 1, a_r = 2, a_max = 3, beta = 3 on [1,2],
// f = 0, eta = 1, mu = indicator(0,1,a). Survival exp(-T a - S min(a,1)).
inline popsteady::Model eh_const() {
  popsteady::EarlyHumanModel md;
  md.a_j = 1.0;
  md.a_r = 2.0;
  md.a_max = 3.0;
  md.beta = [](double a) { return (a >= 1.0 && a <= 2.0) ? 3.0 : 0.0; };
  md.f_nat = [](double) { return 0.0; };
  md.eta = [](double) { return 1.0; };
  md.mu_sen = [](double a) { return (a >= 0.0 && a <= 1.0) ? 1.0 : 0.0; };
  return md;
}

inline double eh_R(double S, double T) { return 3.0 * std::exp(-S) * exp_window(1.0, 2.0, T); }

/// Unnormalized environment (∫_2^3 phi, ∫_0^3 phi) of phi(a) = exp(-T a - S min(a,1)).
inline Environment eh_profile_environment(double S, double T) {
  const double young = exp_window(0.0, 1.0, T + S);
  const double old = std::exp(-S) * exp_window(1.0, 3.0, T);
  const double senescent = std::exp(-S) * exp_window(2.0, 3.0, T);
  return {senescent, young + old};
}

/// Steady state of EH-CONST: on R = 1 (S as a function of T) find the T
/// whose profile environment is parallel to (S,T).
inline Environment eh_steady_state() {
  auto S_of = [](double T) { return std::log(3.0 * exp_window(1.0, 2.0, T)); };
  auto mismatch = [&](double T) {
    const double S = S_of(T);
    const Environment e = eh_profile_environment(S, T);
    return S * e.e2 - T * e.e1;
  };
  const double T = bisect(mismatch, 1e-3, 1.0);
  return {S_of(T), T};
}

// Selection-mutation SM-UNIF: a_m = 2, b = 1/2, beta = b0/(1+P+Q), mu = 0.
inline popsteady::Model sm_unif(double b0 = 3.0) {
  popsteady::SelectionMutationModel md;
  md.a_m = 2.0;
  md.mutation_kernel = [](double, double) { return 0.5; };
  md.beta = [b0](const Environment& e, double, double) { return b0 / (1.0 + e.e1 + e.e2); };
  md.mu = [](const Environment&, double, double) { return 0.0; };
  return md;
}
/// r(M_0) = beta * (1/a_m) ∫_0^{a_m} (a_m - lhat) dlhat = beta.
inline double sm_unif_radius(const Environment& e, double b0 = 3.0) { return b0 / (1.0 + e.e1 + e.e2); }

/// Eigenvalues of a 2x2 matrix with real spectrum, larger first.
inline std::pair<double, double> eig2(double a, double b, double c, double d) {
  const double tr = a + d;
  const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

/// Deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Environment environment(double hi) { return {uniform(0.0, hi), uniform(0.0, hi)}; }

  std::vector<double> nonnegative(int n, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(0.0, hi);
    return v;
  }

  /// Low-frequency nonnegative profile: c0 + sum_j a_j cos(j pi x / L + phase_j), c0 >= sum |a_j|.
  popsteady::Profile smooth_nonnegative(const popsteady::Grid& grid) {
    double a[3], phase[3], c0 = 0.0;
    for (int j = 0; j < 3; ++j) {
      a[j] = uniform(-1.0, 1.0);
      phase[j] = uniform(0.0, 6.283185307179586);
      c0 += std::abs(a[j]);
    }
    c0 += uniform(0.0, 1.0);
    const double width = grid.upper() - grid.lower();
    popsteady::Profile f(grid);
    for (int k = 0; k < f.size(); ++k) {
      const double x = (grid.node(k) - grid.lower()) / width;
      double v = c0;
      for (int j = 0; j < 3; ++j) v += a[j] * std::cos((j + 1) * 3.141592653589793 * x + phase[j]);
      f[k] = v;
    }
    return f;
  }

  ConstJA const_ja() {
    ConstJA c;
    c.l = 0.25 * integer(1, 6);
    c.m = c.l + 0.25 * integer(2, 8);
    c.b0 = uniform(1.5, 8.0);
    c.mu0 = uniform(0.0, 1.0);
    c.g0 = uniform(0.5, 2.0);
    return c;
  }

  /// Constant-rate model with R(0,0) >= r0_min.
  ConstJA supercritical_ja(double r0_min = 1.5) {
    ConstJA c = const_ja();
    while (c.R({0.0, 0.0}) < r0_min) c = const_ja();
    return c;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
