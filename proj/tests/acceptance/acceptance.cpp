// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
// Exit status is 0 only if every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "oracles.hpp"
#include "popsteady/error.hpp"
#include "popsteady/fixedpoint.hpp"
#include "popsteady/levelset.hpp"
#include "popsteady/reproduction.hpp"
#include "popsteady/selmut.hpp"
#include "popsteady/spectral.hpp"

namespace fs = std::filesystem;
using namespace popsteady;
using json = nlohmann::json;

namespace {

// Collects failed checks; an empty list means the criterion passed.
struct Check {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(12);
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    require(std::abs(got - want) <= tol, s.str());
  }
  void le(double got, double bound, const std::string& what) {
    std::ostringstream s;
    s.precision(6);
    s << what << ": " << got << " > " << bound;
    require(got <= bound, s.str());
  }
};

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str()};
}

std::string cfg(const std::string& name) { return POPSTEADY_SOURCE_DIR "/configs/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "popsteady_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::pair<double, double>> read_profile(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto c = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
  }
  return rows;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

void ja_end_to_end(Check& c) {
  const fs::path dir = scratch("c1");
  const auto start = std::chrono::steady_clock::now();
  const CliRun r =
      cli({"solve", "--config", cfg("ja_const.cfg"), "--method", "irreducible", "--out", (dir / "result.json").string()});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(r.code == 0, "solve exit code " + std::to_string(r.code));
  if (r.code != 0) return;
  std::ifstream in(dir / "result.json");
  const json doc = json::parse(in);
  c.near(doc["environment"][0].get<double>(), 1.0, 1e-6, "J");
  c.near(doc["environment"][1].get<double>(), 1.0, 1e-6, "A");
  c.near(doc["scale"].get<double>(), 2.0, 1e-6, "scale");
  c.require(doc["config_echo"]["solver"]["n_cells"] == 2000, "n_cells is not 2000");
  double sup = 0.0;
  for (const auto& [s, v] : read_profile(dir / "profile.csv")) sup = std::max(sup, std::abs(v - 1.0));
  c.le(sup, 1e-6, "sup |p - 1|");
  c.le(seconds, 5.0, "runtime (s)");
}

void net_reproduction_oracle(Check& c) {
  const TransportSystem sys(oracle::ConstJA{}.model(), 2000);
  c.near(net_reproduction(sys, {0, 0}), 3.0, 1e-10, "R(0,0)");
  c.near(net_reproduction(sys, {1, 1}), 1.0, 1e-10, "R(1,1)");
}

void level_set_trace(Check& c) {
  const TransportSystem sys(oracle::ConstJA{}.model(), 2000);
  const LevelCurve curve = trace_zero_set(spectral_level_function(sys), TraceOptions{});
  c.require(curve.samples.size() == 257, "sample count " + std::to_string(curve.samples.size()));
  double worst = 0.0;
  for (const auto& s : curve.samples) worst = std::max(worst, std::abs(s.point.e1 + s.point.e2 - 2.0));
  c.le(worst, 1e-6, "max |J + A - 2|");
}

void spectral_sign(Check& c) {
  const TransportSystem sys(oracle::ConstJA{}.model(), 2000);
  oracle::Gen gen(2024);
  int mismatches = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Environment e = gen.environment(5.0);
    const double bound = spectral_bound(sys, e).bound;
    const double r = net_reproduction(sys, e);
    const int sb = (bound > 0) - (bound < 0), sr = (r > 1) - (r < 1);
    if (sb != sr) ++mismatches;
    worst = std::max(worst, std::abs(characteristic_value(sys, e, bound) - 1.0));
  }
  c.require(mismatches == 0, std::to_string(mismatches) + " sign mismatches");
  c.le(worst, 1e-10, "max |K(s) - 1|");
}

void matrix_convergence(Check& c) {
  double prev = 0.0;
  for (int n : {200, 400, 800}) {
    const TransportSystem sys(oracle::ConstJA{}.model(), n);
    const double err = std::abs(matrix_spectral_bound(sys, {0, 0}).bound - spectral_bound(sys, {0, 0}).bound);
    if (n > 200) c.require(prev / err >= 1.8, "ratio " + std::to_string(prev / err) + " at n=" + std::to_string(n));
    prev = err;
  }
}

void resolvent(Check& c) {
  const oracle::ConstJA model;
  {
    const TransportSystem sys(model.model(), 40000);
    Profile f(sys.grid());
    for (double& v : f.values()) v = 1.0;
    const Profile r = resolvent_apply(sys, {0, 0}, 1.0, f);
    double worst = 0.0;
    for (int k = 0; k < r.size(); ++k) worst = std::max(worst, std::abs(r[k] - oracle::resolvent_value(r.grid().node(k))));
    c.le(worst, 1e-8, "closed form sup error");
  }
  {
    const TransportSystem sys(model.model(), 400);
    const DenseMatrix m = assemble_generator_matrix(sys, {0, 0});
    const double h = sys.grid().step();
    oracle::Gen gen(606);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Profile f = gen.smooth_nonnegative(sys.grid());
      const Profile r = resolvent_apply(sys, {0, 0}, 1.0, f);
      const std::vector<double> mr = m * r.values();
      GridFn diff(sys.grid());
      for (int k = 0; k < diff.size(); ++k) diff[k] = std::abs(r[k] - mr[k] - f[k]);
      worst = std::max(worst, integrate(diff));
    }
    c.le(worst, 50.0 * h, "identity residual vs C h with C = 50");
  }
  {
    const TransportSystem sys(model.model(), 2000);
    const double lambda = 4.0;
    double prev = 1e300;
    for (int k = 0; k <= 6; ++k) {
      const double d = resolvent_distance(sys, {1.0 + std::ldexp(1.0, -k), 1.0}, {1, 1}, lambda);
      c.require(d < prev, "distance not decreasing at k=" + std::to_string(k));
      prev = d;
    }
    c.le(prev, 1e-3, "final resolvent distance (lambda 4)");
  }
}

void consumer_resource(Check& c) {
  const TransportSystem sys(oracle::cr_const(), 2000);
  ScalarOptions o;
  o.allow_partial_curve = true;
  const ScalarSystemResult r = solve_scalar_system(sys, o);
  c.require(r.solutions.size() == 2, "solution count " + std::to_string(r.solutions.size()));
  if (r.solutions.size() != 2) return;
  std::vector<Environment> e;
  for (const auto& s : r.solutions) e.push_back(s.environment);
  std::sort(e.begin(), e.end(), [](auto a, auto b) { return a.e2 < b.e2; });
  c.near(e[0].e1, 2.0, 1e-6, "P of first root");
  c.near(e[0].e2, 1.0, 1e-6, "Q of first root");
  c.near(e[1].e1, 2.0, 1e-6, "P of second root");
  c.near(e[1].e2, 2.0, 1e-6, "Q of second root");
}

void check_diagnostics(Check& c, const Diagnostics& d, const std::string& who) {
  c.require(d.passes(), who + " diagnostics do not pass");
}

void early_human(Check& c) {
  const TransportSystem sys(oracle::eh_const(), 2000);
  const SolveReport mono = solve_steady_state(sys, SolveMethod::Monotone, SolveOptions{});
  const auto& front = mono.curve.samples.front();
  c.require(front.theta == 0.0, "first sample is not on the S axis");
  c.near(front.point.e1, std::log(3.0), 1e-8, "S-axis endpoint");

  const SteadyStateResult& a = mono.solutions.at(0);
  const TransportSystem coarse(oracle::eh_const(), 200);
  const double lambda = perron_rightmost(assemble_generator_matrix(coarse, a.environment)).value;
  const Multiplicity m = multiplicity_diagnostic(coarse, a.environment, lambda);
  c.require(m.geometric == 1 && m.algebraic == 1,
            "multiplicity (" + std::to_string(m.geometric) + "," + std::to_string(m.algebraic) + ") at n=200");

  Profile init(sys.grid());
  for (double& v : init.values()) v = 1.0;
  const SteadyStateResult b = solve_state_space(sys, init, StateSpaceOptions{});
  c.near(b.environment.e1, a.environment.e1, 1e-5, "S monotone vs state-space");
  c.near(b.environment.e2, a.environment.e2, 1e-5, "T monotone vs state-space");
  check_diagnostics(c, a.diagnostics, "monotone");
  check_diagnostics(c, b.diagnostics, "state-space");
}

void selection_mutation(Check& c) {
  const auto md = std::get<SelectionMutationModel>(oracle::sm_unif());
  const SelMutSystem sys(md, 64);
  c.near(sys.radius({0, 0}, 0.0), 3.0, 1e-6, "r(M_0) at (0,0)");
  SolveOptions o;
  o.n_rays = 65;
  const SteadyStateResult s = solve_selmut(sys, o).solutions.at(0);
  c.near(s.environment.e1, 1.0, 1e-6, "P");
  c.near(s.environment.e2, 1.0, 1e-6, "Q");
  double worst = 0.0;
  for (double v : std::get<Density2D>(s.profile).values()) worst = std::max(worst, std::abs(v - 0.5));
  c.le(worst, 1e-4, "sup |u - 1/2|");
  for (double lambda : {10.0, 100.0}) {
    const KernelMatrix k = kernel_assemble(md, {0, 0}, lambda, 64);
    // The bound is attained as lhat -> 0; allow rounding only.
    c.le(weighted_norm(k), 3.0 / lambda * (1.0 + 1e-12), "kernel norm at lambda " + std::to_string(lambda));
  }
}

void fixed_ray_examples(Check& c) {
  c.require(kind_of([] { fixed_ray(DenseMatrix{{0.0, 0.0}, {1.0, 0.0}}); }) == ErrorKind::StrictPositivityFailure,
            "nilpotent matrix is not rejected");
  c.near(fixed_ray(DenseMatrix{{1.0, 2.0}, {3.0, 4.0}}).eigenvalue, (5.0 + std::sqrt(33.0)) / 2.0, 1e-10, "eigenvalue");
  const FixedRay swap = fixed_ray(DenseMatrix{{0.0, 1.0}, {1.0, 0.0}});
  c.near(swap.eigenvalue, 1.0, 1e-10, "swap eigenvalue");
  c.near(swap.ray.at(0), 0.5, 1e-10, "swap ray[0]");
  c.near(swap.ray.at(1), 0.5, 1e-10, "swap ray[1]");
}

void negative_tests(Check& c) {
  for (const char* method : {"irreducible", "monotone", "scalar", "state-space"}) {
    const fs::path dir = scratch(std::string("c11_") + method);
    const CliRun r = cli({"solve", "--config", cfg("ja_const_subcritical.cfg"), "--method", method, "--out",
                          (dir / "result.json").string()});
    c.require(r.code == 1, std::string(method) + ": exit code " + std::to_string(r.code));
    bool named = false;
    try {
      named = json::parse(r.out).value("error", "") == "HypothesisViolated";
    } catch (const json::exception&) {
    }
    c.require(named, std::string(method) + ": error is not HypothesisViolated");
  }
}

void verification_closure(Check& c) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"ja_const.cfg", "irreducible"}, {"ja_const.cfg", "monotone"}, {"ja_const.cfg", "scalar"},
      {"ja_const.cfg", "state-space"}, {"cr_const.cfg", "scalar"},   {"eh_const.cfg", "irreducible"},
      {"eh_const.cfg", "monotone"},    {"eh_const.cfg", "state-space"}, {"sm_unif.cfg", "irreducible"},
  };
  for (const auto& [file, method] : runs) {
    const std::string who = file + " " + method;
    const fs::path dir = scratch("c12_" + file + "_" + method);
    const std::string result = (dir / "result.json").string();
    const CliRun s = cli({"solve", "--config", cfg(file), "--method", method, "--out", result});
    c.require(s.code == 0, who + ": solve exit code " + std::to_string(s.code));
    if (s.code != 0) continue;
    const CliRun v = cli({"verify", result});
    c.require(v.code == 0, who + ": verify exit code " + std::to_string(v.code));
    const json doc = json::parse(v.out);
    for (const auto& sol : doc["solutions"]) {
      const json& d = sol["diagnostics"];
      c.le(d["env_consistency"].get<double>(), 1e-6, who + " env_consistency");
      c.le(d["boundary_residual"].get<double>(), 1e-6, who + " boundary_residual");
      c.le(std::abs(d["R_value"].get<double>() - 1.0), 1e-6, who + " |R - 1|");
      c.le(std::abs(d["sigma_at_env"].get<double>()), 1e-6, who + " |sigma|");
      c.le(d["ode_residual"].get<double>(), d["ode_tolerance"].get<double>(), who + " ode_residual");
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Check&)>> criteria{
      {"JA end-to-end", ja_end_to_end},
      {"net reproduction oracle", net_reproduction_oracle},
      {"level-set trace", level_set_trace},
      {"spectral sign consistency", spectral_sign},
      {"matrix oracle convergence", matrix_convergence},
      {"resolvent", resolvent},
      {"consumer-resource scalar route", consumer_resource},
      {"early-human monotone route", early_human},
      {"selection-mutation", selection_mutation},
      {"fixed ray", fixed_ray_examples},
      {"negative tests", negative_tests},
      {"verification closure", verification_closure},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool pass = c.failures.empty();
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first;
    for (const auto& f : c.failures) std::cout << "\n        " << f;
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
