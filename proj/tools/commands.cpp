#include "commands.hpp"

#include <CLI11.hpp>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "popsteady/config.hpp"
#include "popsteady/error.hpp"
#include "popsteady/fixedpoint.hpp"
#include "popsteady/reproduction.hpp"
#include "popsteady/selmut.hpp"
#include "popsteady/spectral.hpp"

namespace popsteady::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string config;
  std::string out;
  std::string method;
  std::string env;
  std::string matrix;
  std::string result;
  int rays = 0;
  int cells = 0;
  double tol = 0.0;
  double lambda = 1.0;
};

// Failures of the command-line contract rather than of the mathematics.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

double parse_number(std::string_view text) {
  const auto first = text.find_first_not_of(' ');
  const auto last = text.find_last_not_of(' ');
  if (first == std::string_view::npos) throw UsageError("empty number");
  text = text.substr(first, last - first + 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw UsageError("not a number: '" + std::string(text) + "'");
  return v;
}

std::vector<double> parse_list(std::string_view text, char sep) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find(sep, pos);
    out.push_back(parse_number(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

Environment parse_env(const std::string& text, Environment fallback) {
  if (text.empty()) return fallback;
  const auto v = parse_list(text, ',');
  if (v.size() != 2 || v[0] < 0.0 || v[1] < 0.0) throw UsageError("--env needs two nonnegative numbers 'e1,e2'");
  return {v[0], v[1]};
}

DenseMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find(';', pos);
    rows.push_back(parse_list(std::string_view(text).substr(pos, end == std::string::npos ? std::string::npos : end - pos), ','));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  const int n = static_cast<int>(rows.size());
  std::vector<double> entries;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n) throw UsageError("--matrix must be square, rows separated by ';'");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return DenseMatrix(n, std::move(entries));
}

json env_json(const Environment& e) { return json::array({e.e1, e.e2}); }

Environment env_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json config_to_json(const Config& c) {
  json j;
  j["kind"] = c.kind;
  j["constants"] = c.constants;
  j["parameters"] = c.parameters;
  j["rates"] = c.rates;
  const auto& s = c.solver;
  j["solver"] = {{"method", s.method},
                 {"n_cells", s.n_cells},
                 {"n_rays", s.n_rays},
                 {"r_max", s.r_max},
                 {"tol", s.tol},
                 {"damping", s.damping},
                 {"max_iter", s.max_iter},
                 {"multiplicity_cells", s.multiplicity_cells},
                 {"rank_tol", s.rank_tol},
                 {"partial_curve", s.partial_curve}};
  return j;
}

Config config_from_json(const json& j) {
  Config c;
  c.kind = j.at("kind").get<std::string>();
  c.constants = j.at("constants").get<std::map<std::string, double>>();
  c.parameters = j.at("parameters").get<std::map<std::string, double>>();
  c.rates = j.at("rates").get<std::map<std::string, std::string>>();
  const auto& s = j.at("solver");
  c.solver.method = s.at("method").get<std::string>();
  c.solver.n_cells = s.at("n_cells").get<int>();
  c.solver.n_rays = s.at("n_rays").get<int>();
  c.solver.r_max = s.at("r_max").get<double>();
  c.solver.tol = s.at("tol").get<double>();
  c.solver.damping = s.at("damping").get<double>();
  c.solver.max_iter = s.at("max_iter").get<int>();
  c.solver.multiplicity_cells = s.at("multiplicity_cells").get<int>();
  c.solver.rank_tol = s.at("rank_tol").get<double>();
  c.solver.partial_curve = s.at("partial_curve").get<bool>();
  return c;
}

void validate_or_throw(const Model& model) {
  const auto violations = validate_model(model);
  if (violations.empty()) return;
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i)
    os << (i ? "; " : "") << to_string(violations[i].kind) << ": " << violations[i].detail;
  throw Error(ErrorKind::InvalidModel, os.str());
}

struct Loaded {
  Config config;
  Model model;
};

Loaded load(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required");
  Config c = load_config(o.config);
  if (o.cells > 0) c.solver.n_cells = o.cells;
  if (o.rays > 0) c.solver.n_rays = o.rays;
  if (o.tol > 0.0) c.solver.tol = o.tol;
  Model m = build_model(c);
  validate_or_throw(m);
  return {std::move(c), std::move(m)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
  if (!f) throw UsageError("write failed for " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string profile_csv(const SteadyProfile& profile) {
  std::string s;
  if (const auto* p = std::get_if<Profile>(&profile)) {
    s = "s,value\n";
    for (int k = 0; k < p->size(); ++k) s += number(p->grid().node(k)) + "," + number((*p)[k]) + "\n";
  } else {
    const auto& u = std::get<Density2D>(profile);
    s = "l,a,value\n";
    for (int i = 0; i < u.size(); ++i)
      for (int k = 0; k < u.size(); ++k)
        s += number(u.grid().node(i)) + "," + number(u.grid().node(k)) + "," + number(u(i, k)) + "\n";
  }
  return s;
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::size_t columns) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = parse_list(line, ',');
    if (row.size() != columns) throw UsageError(path + ": expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

json diagnostics_json(const Diagnostics& d) {
  json j;
  j["sigma_at_env"] = d.sigma_at_env;
  j["env_consistency"] = d.env_consistency;
  j["boundary_residual"] = d.boundary_residual;
  j["ode_residual"] = d.ode_residual;
  j["ode_tolerance"] = 10.0 * d.step;
  j["R_value"] = d.r_value;
  if (d.resource_residual) j["resource_residual"] = *d.resource_residual;
  if (d.renewal_residual) j["renewal_residual"] = *d.renewal_residual;
  j["positive"] = d.positive;
  j["passes"] = d.passes();
  return j;
}

fs::path sibling(const std::string& out, const std::string& name) {
  return fs::path(out).parent_path() / name;
}

std::string profile_name(std::size_t index) {
  return index == 0 ? "profile.csv" : "profile_" + std::to_string(index + 1) + ".csv";
}

bool is_transport(const Config& c) { return c.kind != "selection-mutation"; }

// --- commands -------------------------------------------------------------

int cmd_spectral_bound(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const Environment env = parse_env(o.env, {0.0, 0.0});
  json j;
  j["model"] = l.config.kind;
  j["environment"] = env_json(env);
  if (!is_transport(l.config)) {
    const SelMutSystem sys(std::get<SelectionMutationModel>(l.model), l.config.solver.n_cells);
    j["method"] = "kernel";
    j["spectral_bound"] = sys.spectral_bound(env);
    j["kernel_radius_at_0"] = sys.radius(env, 0.0);
  } else {
    const TransportSystem sys(l.model, l.config.solver.n_cells);
    const bool matrix = o.method == "matrix";
    if (!o.method.empty() && !matrix && o.method != "characteristic")
      throw UsageError("spectral-bound --method is characteristic or matrix");
    const SpectralResult r = matrix ? matrix_spectral_bound(sys, env) : spectral_bound(sys, env);
    j["method"] = std::string(to_string(r.method));
    j["spectral_bound"] = r.bound;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["R_value"] = net_reproduction(sys, env);
  }
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, text);
  out << text;
  return kSuccess;
}

int cmd_net_reproduction(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const Environment env = parse_env(o.env, {0.0, 0.0});
  json j;
  j["model"] = l.config.kind;
  j["environment"] = env_json(env);
  if (!is_transport(l.config)) {
    const SelMutSystem sys(std::get<SelectionMutationModel>(l.model), l.config.solver.n_cells);
    j["R_value"] = sys.radius(env, 0.0);
  } else {
    const TransportSystem sys(l.model, l.config.solver.n_cells);
    j["R_value"] = net_reproduction(sys, env);
    if (sys.kind() == TransportKind::JuvenileAdult) j["ratio_residual"] = ja_ratio_residual(sys, env);
    if (sys.kind() == TransportKind::ConsumerResource) j["balance_residual"] = cr_balance_residual(sys, env);
  }
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, text);
  out << text;
  return kSuccess;
}

int cmd_trace(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  TraceOptions t;
  t.n_rays = l.config.solver.n_rays;
  t.r_max = l.config.solver.r_max;
  t.tol = l.config.solver.tol;
  LevelCurve curve;
  if (!is_transport(l.config)) {
    const SelMutSystem sys(std::get<SelectionMutationModel>(l.model), l.config.solver.n_cells);
    curve = trace_zero_set(selmut_level_function(sys), t);
  } else {
    const TransportSystem sys(l.model, l.config.solver.n_cells);
    if (sys.kind() == TransportKind::ConsumerResource) {
      t.skip_failed_rays = l.config.solver.partial_curve;
      curve = trace_zero_set(reproduction_level_function(sys), t);
    } else {
      curve = trace_zero_set(spectral_level_function(sys), t);
    }
  }
  std::string csv = "theta,rho,e1,e2,sigma_residual\n";
  for (const auto& s : curve.samples)
    csv += number(s.theta) + "," + number(s.rho) + "," + number(s.point.e1) + "," + number(s.point.e2) + "," +
           number(s.sigma_residual) + "\n";
  if (o.out.empty()) {
    out << csv;
  } else {
    write_file(o.out, csv);
    json j;
    j["curve"] = o.out;
    j["samples"] = curve.samples.size();
    j["skipped_rays"] = curve.skipped_thetas.size();
    out << dump(j);
  }
  return kSuccess;
}

std::string solve_method(const Options& o, const Config& c) {
  std::string m = !o.method.empty() ? o.method : c.solver.method;
  if (m.empty()) m = c.kind == "consumer-resource" ? "scalar" : "irreducible";
  if (m != "irreducible" && m != "monotone" && m != "scalar" && m != "state-space")
    throw UsageError("unknown method '" + m + "' (irreducible, monotone, scalar, state-space)");
  if (c.kind == "consumer-resource" && m != "scalar")
    throw UsageError("the consumer-resource model is solved only by --method scalar");
  if (c.kind == "selection-mutation" && m != "irreducible")
    throw UsageError("the selection-mutation model is solved only by --method irreducible");
  if (c.kind == "early-human" && m == "scalar")
    throw UsageError("--method scalar needs the juvenile-adult or consumer-resource model");
  return m;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw UsageError("--out is required");
  const Loaded l = load(o);
  const std::string method = solve_method(o, l.config);
  const auto& sc = l.config.solver;

  std::vector<SteadyStateResult> solutions;
  std::vector<std::string> warnings;
  if (!is_transport(l.config)) {
    const SelMutSystem sys(std::get<SelectionMutationModel>(l.model), sc.n_cells);
    SolveOptions so;
    so.n_rays = sc.n_rays;
    so.r_max = sc.r_max;
    so.tol = sc.tol;
    solutions = solve_selmut(sys, so).solutions;
  } else {
    const TransportSystem sys(l.model, sc.n_cells);
    if (method == "scalar") {
      ScalarOptions so;
      so.n_rays = sc.n_rays;
      so.r_max = sc.r_max;
      so.tol = sc.tol;
      so.allow_partial_curve = sc.partial_curve;
      const ScalarSystemResult r = solve_scalar_system(sys, so);
      warnings = r.warnings;
      for (const auto& b : r.boundary_roots)
        warnings.push_back("boundary root (" + number(b.e1) + ", " + number(b.e2) + ") is not a positive steady state");
      if (r.solutions.empty()) throw Error(ErrorKind::NoCrossing, "the residual has no sign change along R = 1");
      for (const auto& s : r.solutions) {
        SteadyStateResult st = steady_state_from_environment(sys, s.environment);
        if (s.negative_resource_growth) st.warnings.push_back("f(Q) < 0 at this root");
        solutions.push_back(std::move(st));
      }
    } else if (method == "state-space") {
      StateSpaceOptions so;
      so.damping = sc.damping;
      so.max_iter = sc.max_iter;
      so.r_max = sc.r_max;
      so.ray_tol = sc.tol;
      Profile init(sys.grid());
      for (double& v : init.values()) v = 1.0;
      solutions.push_back(solve_state_space(sys, init, so));
    } else {
      SolveOptions so;
      so.n_rays = sc.n_rays;
      so.r_max = sc.r_max;
      so.tol = sc.tol;
      so.multiplicity_cells = sc.multiplicity_cells;
      so.rank_tol = sc.rank_tol;
      solutions = solve_steady_state(sys, method == "monotone" ? SolveMethod::Monotone : SolveMethod::Irreducible, so)
                      .solutions;
    }
  }

  Config echo = l.config;
  echo.solver.method = method;
  json j;
  j["model"] = l.config.kind;
  j["method"] = method;
  const SteadyStateResult& first = solutions.front();
  j["environment"] = env_json(first.environment);
  j["scale"] = first.scale;
  j["diagnostics"] = diagnostics_json(first.diagnostics);
  j["config_echo"] = config_to_json(echo);
  json list = json::array();
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const auto& s = solutions[i];
    json e;
    e["environment"] = env_json(s.environment);
    e["scale"] = s.scale;
    e["boundary"] = s.boundary;
    e["diagnostics"] = diagnostics_json(s.diagnostics);
    if (s.multiplicity)
      e["multiplicity"] = {{"geometric", s.multiplicity->geometric},
                           {"algebraic", s.multiplicity->algebraic},
                           {"order", s.multiplicity->order}};
    if (s.iterations > 0) e["iterations"] = s.iterations;
    e["profile_file"] = profile_name(i);
    e["warnings"] = s.warnings;
    list.push_back(std::move(e));
    write_file(sibling(o.out, profile_name(i)).string(), profile_csv(s.profile));
  }
  j["solutions"] = std::move(list);
  j["warnings"] = warnings;
  write_file(o.out, dump(j));

  json summary;
  summary["result"] = o.out;
  summary["solutions"] = solutions.size();
  summary["environment"] = env_json(first.environment);
  summary["passes"] = first.diagnostics.passes();
  out << dump(summary);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return kSuccess;
}

int cmd_resolvent(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  if (l.config.kind != "juvenile-adult") throw UsageError("resolvent-check needs the juvenile-adult model");
  const TransportSystem sys(l.model, l.config.solver.n_cells);
  const Environment env = parse_env(o.env, {0.0, 0.0});
  const double lambda = o.lambda;
  Profile f(sys.grid());
  for (double& v : f.values()) v = 1.0;
  const Profile r = resolvent_apply(sys, env, lambda, f);

  const DenseMatrix m = assemble_generator_matrix(sys, env);
  const std::vector<double> mr = m * r.values();
  GridFn diff(sys.grid());
  for (int k = 0; k < diff.size(); ++k) diff[k] = std::abs(lambda * r[k] - mr[k] - f[k]);

  json j;
  j["model"] = l.config.kind;
  j["environment"] = env_json(env);
  j["lambda"] = lambda;
  j["step"] = sys.grid().step();
  j["identity_residual"] = integrate(diff);
  json dist = json::array();
  for (int k = 0; k <= 6; ++k) {
    const Environment ek{env.e1 + std::ldexp(1.0, -k), env.e2};
    dist.push_back(resolvent_distance(sys, ek, env, lambda));
  }
  j["distances"] = std::move(dist);
  std::string csv = "s,value\n";
  for (int k = 0; k < r.size(); ++k) csv += number(r.grid().node(k)) + "," + number(r[k]) + "\n";
  if (!o.out.empty()) {
    write_file(o.out, csv);
    j["resolvent"] = o.out;
  }
  out << dump(j);
  return kSuccess;
}

int cmd_fixed_ray(const Options& o, std::ostream& out) {
  if (o.matrix.empty()) throw UsageError("--matrix is required, e.g. --matrix '1,2;3,4'");
  const FixedRay r = fixed_ray(parse_matrix(o.matrix), o.tol > 0.0 ? o.tol : 1e-12);
  json j;
  j["eigenvalue"] = r.eigenvalue;
  j["ray"] = r.ray;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, text);
  out << text;
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (o.result.empty()) throw UsageError("verify needs the result file");
  std::ifstream in(o.result, std::ios::binary);
  if (!in) throw UsageError("cannot read " + o.result);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(o.result + ": " + e.what());
  }
  Config c;
  try {
    c = config_from_json(doc.at("config_echo"));
  } catch (const json::exception& e) {
    throw UsageError(o.result + ": config_echo is incomplete: " + e.what());
  }
  const Model model = build_model(c);
  validate_or_throw(model);

  json reports = json::array();
  bool all = true;
  for (const auto& s : doc.at("solutions")) {
    const Environment env = env_from_json(s.at("environment"));
    const std::string file = sibling(o.result, s.at("profile_file").get<std::string>()).string();
    Diagnostics d;
    if (c.kind == "selection-mutation") {
      const SelMutSystem sys(std::get<SelectionMutationModel>(model), c.solver.n_cells);
      const auto rows = read_csv(file, 3);
      const int n = sys.grid().size();
      if (rows.size() != static_cast<std::size_t>(n) * n) throw UsageError(file + ": density size does not match the grid");
      Density2D u(sys.grid());
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) u(i, k) = rows[static_cast<std::size_t>(i) * n + k][2];
      d = verify_selmut(sys, env, u);
    } else {
      const TransportSystem sys(model, c.solver.n_cells);
      const auto rows = read_csv(file, 2);
      if (rows.size() != static_cast<std::size_t>(sys.grid().size())) throw UsageError(file + ": profile size does not match the grid");
      Profile p(sys.grid());
      for (int k = 0; k < p.size(); ++k) {
        if (std::abs(rows[k][0] - sys.grid().node(k)) > 1e-9 * (1.0 + std::abs(sys.grid().node(k))))
          throw UsageError(file + ": node " + std::to_string(k) + " does not match the grid");
        p[k] = rows[k][1];
      }
      d = verify_steady_state(sys, env, p);
    }
    all = all && d.passes();
    json r;
    r["environment"] = env_json(env);
    r["profile_file"] = s.at("profile_file");
    r["diagnostics"] = diagnostics_json(d);
    reports.push_back(std::move(r));
  }
  json j;
  j["result"] = o.result;
  j["passes"] = all;
  j["solutions"] = std::move(reports);
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, text);
  out << text;
  return all ? kSuccess : kMathFailure;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::ParseError:
    case ErrorKind::UnboundVariable:
    case ErrorKind::InvalidArgument:
    case ErrorKind::UnsupportedModel:
    case ErrorKind::GridMisaligned: return kUsage;
    default: return kMathFailure;
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive steady states of structured population models", "popsteady"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* c) { c->add_option("--config", o.config, "Model configuration file")->required(); };
  auto add_out = [&](CLI::App* c, const char* what) { c->add_option("--out", o.out, what); };
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--cells", o.cells, "Override solver n_cells")->check(CLI::PositiveNumber);
    c->add_option("--tol", o.tol, "Override the solver tolerance")->check(CLI::PositiveNumber);
  };

  auto* sb = app.add_subcommand("spectral-bound", "Spectral bound at one environment");
  add_config(sb);
  add_grid(sb);
  add_out(sb, "JSON output file");
  sb->add_option("--env", o.env, "Environment 'e1,e2' (default 0,0)");
  sb->add_option("--method", o.method, "characteristic (default) or matrix");

  auto* nr = app.add_subcommand("net-reproduction", "Net reproduction number at one environment");
  add_config(nr);
  add_grid(nr);
  add_out(nr, "JSON output file");
  nr->add_option("--env", o.env, "Environment 'e1,e2' (default 0,0)");

  auto* tl = app.add_subcommand("trace-levelset", "Trace the zero set of the spectral bound (R - 1 for consumer-resource)");
  add_config(tl);
  add_grid(tl);
  add_out(tl, "CSV output file (stdout if absent)");
  tl->add_option("--rays", o.rays, "Number of rays")->check(CLI::Range(2, 1 << 20));

  auto* so = app.add_subcommand("solve", "Find positive steady states");
  add_config(so);
  add_grid(so);
  add_out(so, "Result JSON; profiles are written next to it");
  so->add_option("--method", o.method, "irreducible, monotone, scalar or state-space");
  so->add_option("--rays", o.rays, "Number of rays")->check(CLI::Range(2, 1 << 20));

  auto* rc = app.add_subcommand("resolvent-check", "Explicit resolvent and its continuity in the environment");
  add_config(rc);
  add_grid(rc);
  add_out(rc, "CSV of the resolvent applied to f = 1");
  rc->add_option("--env", o.env, "Environment 'e1,e2' (default 0,0)");
  rc->add_option("--lambda", o.lambda, "Resolvent parameter (default 1)");

  auto* fr = app.add_subcommand("fixed-ray", "Fixed ray of a nonnegative matrix");
  fr->add_option("--matrix", o.matrix, "Rows separated by ';', entries by ','")->required();
  fr->add_option("--tol", o.tol, "Residual tolerance (default 1e-12)")->check(CLI::PositiveNumber);
  add_out(fr, "JSON output file");

  auto* vf = app.add_subcommand("verify", "Recompute the residuals of a solve result");
  vf->add_option("result,--result", o.result, "Result JSON written by solve")->required();
  add_out(vf, "JSON output file");

  std::vector<std::string> argv_store{"popsteady"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string name = app.get_subcommands().front()->get_name();
  int code = kSuccess;
  try {
    if (name == "spectral-bound") code = cmd_spectral_bound(o, out);
    else if (name == "net-reproduction") code = cmd_net_reproduction(o, out);
    else if (name == "trace-levelset") code = cmd_trace(o, out);
    else if (name == "solve") code = cmd_solve(o, out, err);
    else if (name == "resolvent-check") code = cmd_resolvent(o, out);
    else if (name == "fixed-ray") code = cmd_fixed_ray(o, out);
    else code = cmd_verify(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    out << dump({{"error", "UsageError"}, {"message", e.what()}});
    return kUsage;
  } catch (const Error& e) {
    json report = {{"error", std::string(to_string(e.kind()))}, {"message", e.detail()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) report["position"] = pe->position();
    out << dump(report);
    err << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << name << ": " << elapsed << " s\n";
  return code;
}

}  // namespace popsteady::cli
