#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using popsteady::cli::run_command;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string cfg(const std::string& name) { return POPSTEADY_SOURCE_DIR "/configs/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "popsteady_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

}  // namespace

TEST(Cli, SpectralBound) {
  const Outcome r = run({"spectral-bound", "--config", cfg("ja_const.cfg"), "--env", "1,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_NEAR(j["spectral_bound"].get<double>(), 0.0, 1e-8);
  EXPECT_NEAR(j["R_value"].get<double>(), 1.0, 1e-9);

  const Outcome m = run({"spectral-bound", "--config", cfg("ja_const.cfg"), "--method", "matrix", "--cells", "200"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(parse(m.out)["method"], "matrix");
}

TEST(Cli, NetReproduction) {
  const Outcome r = run({"net-reproduction", "--config", cfg("cr_const.cfg"), "--env", "2,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_NEAR(j["R_value"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(j["balance_residual"].get<double>(), 0.0, 1e-9);
}

TEST(Cli, TraceLevelsetRows) {
  const Outcome r = run({"trace-levelset", "--config", cfg("ja_const.cfg"), "--cells", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "theta,rho,e1,e2,sigma_residual");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 257);
}

TEST(Cli, SolveThenVerifyEachModel) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"ja_const.cfg", "irreducible"}, {"ja_const.cfg", "monotone"},   {"ja_const.cfg", "scalar"},
      {"ja_const.cfg", "state-space"}, {"cr_const.cfg", "scalar"},     {"eh_const.cfg", "irreducible"},
      {"eh_const.cfg", "monotone"},    {"sm_unif.cfg", "irreducible"},
  };
  for (const auto& [file, method] : cases) {
    const fs::path dir = scratch(file + "_" + method);
    const std::string result = (dir / "result.json").string();
    std::vector<std::string> args{"solve", "--config", cfg(file), "--method", method, "--out", result};
    if (file == "sm_unif.cfg") args.insert(args.end(), {"--cells", "48", "--rays", "33"});
    else args.insert(args.end(), {"--cells", "400", "--rays", "65"});
    const Outcome s = run(args);
    ASSERT_EQ(s.code, 0) << file << " " << method << ": " << s.out << s.err;
    EXPECT_TRUE(fs::exists(dir / "profile.csv"));
    const auto doc = parse(slurp(result));
    EXPECT_EQ(doc["method"], method);
    EXPECT_TRUE(doc.contains("config_echo"));
    const Outcome v = run({"verify", result});
    EXPECT_EQ(v.code, 0) << file << " " << method << ": " << v.out;
  }
}

TEST(Cli, CrSolveWritesBothProfiles) {
  const fs::path dir = scratch("cr_two");
  const Outcome s = run({"solve", "--config", cfg("cr_const.cfg"), "--cells", "400", "--out", (dir / "r.json").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(parse(s.out)["solutions"], 2);
  EXPECT_TRUE(fs::exists(dir / "profile_2.csv"));
}

TEST(Cli, VerifyRejectsTamperedProfile) {
  const fs::path dir = scratch("tamper");
  const std::string result = (dir / "result.json").string();
  ASSERT_EQ(run({"solve", "--config", cfg("ja_const.cfg"), "--cells", "400", "--out", result}).code, 0);
  std::string csv = slurp(dir / "profile.csv");
  std::istringstream in(csv);
  std::string header, line, rebuilt;
  std::getline(in, header);
  rebuilt = header + "\n";
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rebuilt += line.substr(0, comma) + "," + std::to_string(1.1 * std::stod(line.substr(comma + 1))) + "\n";
  }
  std::ofstream(dir / "profile.csv", std::ios::binary) << rebuilt;
  EXPECT_EQ(run({"verify", result}).code, 1);
}

TEST(Cli, OutputIsDeterministic) {
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = scratch("det" + std::to_string(pass));
    ASSERT_EQ(run({"solve", "--config", cfg("eh_const.cfg"), "--cells", "300", "--rays", "33", "--out",
                   (dir / "result.json").string()})
                  .code,
              0);
  }
  const fs::path base = fs::temp_directory_path() / "popsteady_cli_test";
  for (const char* f : {"result.json", "profile.csv"}) {
    const std::string a = slurp(base / "det0" / f), b = slurp(base / "det1" / f);
    EXPECT_FALSE(a.empty());
    // The result echoes its own path; compare with the directory names aligned.
    std::string b_aligned = b;
    for (std::size_t p; (p = b_aligned.find("det1")) != std::string::npos;) b_aligned.replace(p, 4, "det0");
    EXPECT_EQ(a, b_aligned) << f;
  }
  const Outcome x = run({"trace-levelset", "--config", cfg("sm_unif.cfg"), "--cells", "24", "--rays", "9"});
  const Outcome y = run({"trace-levelset", "--config", cfg("sm_unif.cfg"), "--cells", "24", "--rays", "9"});
  EXPECT_EQ(x.out, y.out);
}

TEST(Cli, SubcriticalFailsForEveryMethod) {
  for (const char* method : {"irreducible", "monotone", "scalar", "state-space"}) {
    const fs::path dir = scratch(std::string("sub_") + method);
    const Outcome r = run({"solve", "--config", cfg("ja_const_subcritical.cfg"), "--method", method, "--cells", "400",
                       "--out", (dir / "result.json").string()});
    EXPECT_EQ(r.code, 1) << method;
    EXPECT_EQ(parse(r.out)["error"], "HypothesisViolated") << method << ": " << r.out;
    EXPECT_FALSE(fs::exists(dir / "result.json"));
  }
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"spectral-bound"}).code, 2);
  EXPECT_EQ(run({"spectral-bound", "--config", cfg("missing.cfg")}).code, 2);
  EXPECT_EQ(run({"spectral-bound", "--config", cfg("ja_const.cfg"), "--env", "1"}).code, 2);
  EXPECT_EQ(run({"solve", "--config", cfg("cr_const.cfg"), "--method", "irreducible", "--out", "x.json"}).code, 2);
  EXPECT_EQ(run({"solve", "--config", cfg("ja_const.cfg"), "--method", "newton", "--out", "x.json"}).code, 2);
  EXPECT_EQ(run({"solve", "--config", cfg("ja_const.cfg")}).code, 2);
  EXPECT_EQ(run({"resolvent-check", "--config", cfg("eh_const.cfg")}).code, 2);
  EXPECT_EQ(run({"fixed-ray", "--matrix", "1,2;3"}).code, 2);
  EXPECT_EQ(run({"verify", "/nonexistent/result.json"}).code, 2);
}

TEST(Cli, FixedRayAndResolvent) {
  const Outcome f = run({"fixed-ray", "--matrix", "1,2;3,4"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_NEAR(parse(f.out)["eigenvalue"].get<double>(), (5.0 + std::sqrt(33.0)) / 2.0, 1e-10);
  const Outcome s = run({"fixed-ray", "--matrix", "0,0;1,0"});
  EXPECT_EQ(s.code, 1);

  const Outcome r = run({"resolvent-check", "--config", cfg("ja_const.cfg"), "--cells", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_EQ(j["distances"].size(), 7u);
  EXPECT_LE(j["identity_residual"].get<double>(), 50.0 * j["step"].get<double>());
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = POPSTEADY_BINARY;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(bin + " fixed-ray --matrix '2,1;1,2'"), 0);
  EXPECT_EQ(status(bin + " spectral-bound"), 2);
  EXPECT_EQ(status(bin + " solve --config " + cfg("ja_const_subcritical.cfg") + " --cells 200 --out " +
                   (scratch("bin") / "r.json").string()),
            1);
}
