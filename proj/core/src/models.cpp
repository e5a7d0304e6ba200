#include "popsteady/models.hpp"

#include <cmath>
#include <sstream>

#include "popsteady/error.hpp"

namespace popsteady {

double Environment::norm1() const noexcept { return std::abs(e1) + std::abs(e2); }
double Environment::norm2() const noexcept { return std::hypot(e1, e2); }

std::string model_name(const Model& model) {
  switch (model.index()) {
    case 0: return "juvenile-adult";
    case 1: return "consumer-resource";
    case 2: return "early-human";
    default: return "selection-mutation";
  }
}

Density2D::Density2D(Grid grid) : grid_(grid), values_(static_cast<std::size_t>(grid.size()) * grid.size(), 0.0) {}

Density2D::Density2D(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.size()) * grid_.size())
    throw Error(ErrorKind::InvalidArgument, "density length does not match the square grid");
}

double total_mass(const Density2D& u) {
  const int n = u.size();
  const double h = u.grid().step();
  std::vector<double> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = trapezoid_uniform(h, u.values().subspan(static_cast<std::size_t>(i) * n, n));
  return trapezoid_uniform(h, rows);
}

namespace {

int require_node(const Grid& grid, double x, const char* what) {
  auto k = grid.node_index(x);
  if (!k) {
    std::ostringstream os;
    os << what << " = " << x << " is not a node of the grid on [" << grid.lower() << ", " << grid.upper()
       << "] with " << grid.n_cells() << " cells";
    throw Error(ErrorKind::GridMisaligned, os.str());
  }
  return *k;
}

}  // namespace

Environment environment_ja(const Profile& p, const JuvenileAdultModel& model) {
  const int kl = require_node(p.grid(), model.l, "maturation size l");
  const int km = require_node(p.grid(), model.m, "maximal size m");
  return {integrate_range(p, 0, kl), integrate_range(p, kl, km)};
}

Environment environment_eh(const Profile& p, const EarlyHumanModel& model) {
  const int kr = require_node(p.grid(), model.a_r, "retirement age a_r");
  const int kmax = require_node(p.grid(), model.a_max, "maximal age a_max");
  return {integrate_range(p, kr, kmax), integrate_range(p, 0, kmax)};
}

Environment environment_sm(const Density2D& u, const SelectionMutationModel& model) {
  (void)require_node(u.grid(), model.a_m, "maximal age a_m");
  const int n = u.size();
  const double h = u.grid().step();
  std::vector<double> below(n);
  std::vector<double> above(n);
  for (int i = 0; i < n; ++i) {
    auto row = u.values().subspan(static_cast<std::size_t>(i) * n, n);
    below[i] = trapezoid_uniform(h, row.first(i + 1));
    above[i] = trapezoid_uniform(h, row.subspan(i));
  }
  return {trapezoid_uniform(h, below), trapezoid_uniform(h, above)};
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::InvalidStructure: return "InvalidStructure";
    case ViolationKind::NegativeRate: return "NegativeRate";
    case ViolationKind::GammaNotBoundedAway: return "GammaNotBoundedAway";
    case ViolationKind::BetaOutsideSupport: return "BetaOutsideSupport";
    case ViolationKind::BetaTailZero: return "BetaTailZero";
    case ViolationKind::KernelNotDensity: return "KernelNotDensity";
  }
  return "Unknown";
}

namespace {

const Environment kLattice[] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.3, 2.7}, {5, 5}, {10, 0}, {0, 10}};
constexpr int kPoints = 64;

class Checker {
 public:
  std::vector<Violation> out;

  void add(ViolationKind kind, std::string detail) {
    for (const auto& v : out)
      if (v.kind == kind) return;  // one report per kind is enough
    out.push_back({kind, std::move(detail)});
  }

  void rate(const char* name, double value, double s, const Environment& e) {
    if (!std::isfinite(value) || value < 0.0) {
      std::ostringstream os;
      os << name << "(" << s << ", " << e.e1 << ", " << e.e2 << ") = " << value;
      add(ViolationKind::NegativeRate, os.str());
    }
  }

  void growth(double value, double s, const Environment& e) {
    if (std::isfinite(value) && value < kGammaMin) {
      std::ostringstream os;
      os << "gamma(" << s << ", " << e.e1 << ", " << e.e2 << ") = " << value << " < " << kGammaMin;
      add(ViolationKind::GammaNotBoundedAway, os.str());
    }
  }
};

template <class F>
void for_points(double lo, double hi, F&& f) {
  for (int k = 0; k <= kPoints; ++k) f(lo + (hi - lo) * k / kPoints);
}

void check(const JuvenileAdultModel& m, Checker& c) {
  if (!(m.l > 0 && m.l < m.m && std::isfinite(m.m))) {
    c.add(ViolationKind::InvalidStructure, "requires 0 < l < m < inf");
    return;
  }
  const double eps = (m.m - m.l) / 8.0;
  for (const auto& e : kLattice) {
    for_points(0.0, m.m, [&](double s) {
      c.rate("beta", m.beta(s, e), s, e);
      c.rate("mu", m.mu(s, e), s, e);
      const double g = m.gamma(s, e);
      c.rate("gamma", g, s, e);
      c.growth(g, s, e);
    });
    for_points(0.0, m.l * (1.0 - 1.0 / kPoints), [&](double s) {
      if (m.beta(s, e) != 0.0) c.add(ViolationKind::BetaOutsideSupport, "beta nonzero below l at s = " + std::to_string(s));
    });
    bool tail_positive = false;
    for_points(m.m - eps, m.m, [&](double s) { tail_positive = tail_positive || m.beta(s, e) > 0.0; });
    if (!tail_positive) {
      std::ostringstream os;
      os << "beta vanishes on [" << m.m - eps << ", " << m.m << "] at environment (" << e.e1 << ", " << e.e2 << ")";
      c.add(ViolationKind::BetaTailZero, os.str());
    }
  }
}

void check(const ConsumerResourceModel& m, Checker& c) {
  if (!(m.m > 0 && std::isfinite(m.m))) {
    c.add(ViolationKind::InvalidStructure, "requires 0 < m < inf");
    return;
  }
  for (const auto& e : kLattice)
    for_points(0.0, m.m, [&](double s) {
      c.rate("beta", m.beta(s, e), s, e);
      c.rate("mu", m.mu(s, e), s, e);
      c.rate("feeding", m.feeding(s, e), s, e);
      const double g = m.gamma(s, e);
      c.rate("gamma", g, s, e);
      c.growth(g, s, e);
    });
  const double far1 = m.resource_growth(1e3);
  const double far2 = m.resource_growth(1e6);
  if (!(far1 < 0.0 || far2 < 0.0))
    c.add(ViolationKind::InvalidStructure, "resource growth f(Q) is not negative for large Q");
}

void check(const EarlyHumanModel& m, Checker& c) {
  if (!(0 < m.a_j && m.a_j < m.a_r && m.a_r < m.a_max && std::isfinite(m.a_max))) {
    c.add(ViolationKind::InvalidStructure, "requires 0 < a_j < a_r < a_max < inf");
    return;
  }
  const Environment none{};
  for_points(0.0, m.a_max, [&](double a) {
    const double b = m.beta(a);
    c.rate("beta", b, a, none);
    c.rate("f_nat", m.f_nat(a), a, none);
    c.rate("eta", m.eta(a), a, none);
    c.rate("mu_sen", m.mu_sen(a), a, none);
    const double tiny = 1e-12 * m.a_max;
    if ((a < m.a_j - tiny || a > m.a_r + tiny) && b != 0.0)
      c.add(ViolationKind::BetaOutsideSupport, "beta nonzero outside [a_j, a_r] at a = " + std::to_string(a));
  });
}

void check(const SelectionMutationModel& m, Checker& c) {
  if (!(m.a_m > 0 && std::isfinite(m.a_m))) {
    c.add(ViolationKind::InvalidStructure, "requires 0 < a_m < inf");
    return;
  }
  const Grid fine(0.0, m.a_m, 2048);
  for_points(0.0, m.a_m, [&](double lhat) {
    auto b = GridFn::sample(fine, [&](double l) { return m.mutation_kernel(l, lhat); });
    for (double v : b.values())
      if (!std::isfinite(v) || v < 0.0) c.add(ViolationKind::NegativeRate, "mutation kernel negative or non-finite");
    const double mass = integrate(b);
    if (std::abs(mass - 1.0) > 1e-8) {
      std::ostringstream os;
      os << "integral of b(., " << lhat << ") is " << mass;
      c.add(ViolationKind::KernelNotDensity, os.str());
    }
  });
  for (const auto& e : kLattice)
    for_points(0.0, m.a_m, [&](double lhat) {
      for_points(0.0, m.a_m, [&](double a) {
        c.rate("beta", m.beta(e, lhat, a), a, e);
        c.rate("mu", m.mu(e, lhat, a), a, e);
      });
    });
}

}  // namespace

std::vector<Violation> validate_model(const Model& model) {
  Checker c;
  try {
    std::visit([&](const auto& m) { check(m, c); }, model);
  } catch (const Error& e) {
    // Rate evaluation failures (e.g. a domain error in an expression) count as invalid rates.
    c.add(ViolationKind::NegativeRate, e.what());
  }
  return c.out;
}

Grid structured_grid(const Model& model, int min_cells) {
  double upper = 0.0;
  std::vector<double> breaks;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, JuvenileAdultModel>) {
          upper = m.m;
          breaks = {m.l};
        } else if constexpr (std::is_same_v<T, ConsumerResourceModel>) {
          upper = m.m;
        } else if constexpr (std::is_same_v<T, EarlyHumanModel>) {
          upper = m.a_max;
          breaks = {m.a_j, m.a_r};
        } else {
          upper = m.a_m;
        }
      },
      model);
  const int start = std::max(min_cells, 2);
  const int limit = 4 * start + 4096;
  for (int n = start + (start % 2); n <= limit; n += 2) {
    bool ok = true;
    for (double b : breaks) {
      const double pos = b / upper * n;
      const double k = std::round(pos);
      if (std::abs(pos - k) > 1e-7 || static_cast<long long>(k) % 2 != 0) {
        ok = false;
        break;
      }
    }
    if (ok) return Grid(0.0, upper, n);
  }
  throw Error(ErrorKind::GridMisaligned,
              "no cell count in [" + std::to_string(start) + ", " + std::to_string(limit) +
                  "] places every break point on an even grid node");
}

TransportSystem::TransportSystem(const Model& model, int min_cells)
    : model_(model), kind_(TransportKind::JuvenileAdult), grid_(structured_grid(model, min_cells)) {
  if (std::holds_alternative<SelectionMutationModel>(model))
    throw Error(ErrorKind::UnsupportedModel, "the selection-mutation model is not a transport system");
  const int n = grid_.n_cells();
  if (const auto* ja = std::get_if<JuvenileAdultModel>(&model_)) {
    kind_ = TransportKind::JuvenileAdult;
    fertile_first_ = *grid_.node_index(ja->l);
    fertile_last_ = n;
  } else if (std::holds_alternative<ConsumerResourceModel>(model_)) {
    kind_ = TransportKind::ConsumerResource;
    fertile_first_ = 0;
    fertile_last_ = n;
  } else {
    const auto& eh = std::get<EarlyHumanModel>(model_);
    kind_ = TransportKind::EarlyHuman;
    fertile_first_ = *grid_.node_index(eh.a_j);
    fertile_last_ = *grid_.node_index(eh.a_r);
  }
}

double TransportSystem::growth(double s, const Environment& env) const {
  switch (kind_) {
    case TransportKind::JuvenileAdult: return std::get<JuvenileAdultModel>(model_).gamma(s, env);
    case TransportKind::ConsumerResource: return std::get<ConsumerResourceModel>(model_).gamma(s, env);
    case TransportKind::EarlyHuman: return 1.0;
  }
  return 1.0;
}

double TransportSystem::mortality(double s, const Environment& env) const {
  switch (kind_) {
    case TransportKind::JuvenileAdult: return std::get<JuvenileAdultModel>(model_).mu(s, env);
    case TransportKind::ConsumerResource: return std::get<ConsumerResourceModel>(model_).mu(s, env);
    case TransportKind::EarlyHuman: {
      const auto& m = std::get<EarlyHumanModel>(model_);
      return m.f_nat(s) + m.eta(s) * env.e2 + m.mu_sen(s) * env.e1;
    }
  }
  return 0.0;
}

double TransportSystem::fertility(double s, const Environment& env) const {
  switch (kind_) {
    case TransportKind::JuvenileAdult: return std::get<JuvenileAdultModel>(model_).beta(s, env);
    case TransportKind::ConsumerResource: return std::get<ConsumerResourceModel>(model_).beta(s, env);
    case TransportKind::EarlyHuman: return std::get<EarlyHumanModel>(model_).beta(s);
  }
  return 0.0;
}

Environment TransportSystem::environment(const Profile& p) const {
  switch (kind_) {
    case TransportKind::JuvenileAdult: return environment_ja(p, std::get<JuvenileAdultModel>(model_));
    case TransportKind::EarlyHuman: return environment_eh(p, std::get<EarlyHumanModel>(model_));
    case TransportKind::ConsumerResource: break;
  }
  throw Error(ErrorKind::UnsupportedModel,
              "the consumer-resource environment includes the resource and is not a function of the profile");
}

}  // namespace popsteady
