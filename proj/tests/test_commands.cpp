#include "refugium/commands.hpp"
#include "refugium/verify.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace refugium;
namespace fs = std::filesystem;

namespace {

CommandContext context(const std::string& config_text, const std::string& tag) {
  std::istringstream in(config_text);
  CommandContext ctx;
  ctx.config = parse_config(in);
  ctx.out_dir = (fs::temp_directory_path() / ("refugium_test_" + tag)).string();
  fs::remove_all(ctx.out_dir);
  return ctx;
}

std::string slurp(const std::string& dir, const std::string& name) {
  std::ifstream in(fs::path(dir) / name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

const char* kSmall = "[domain]\nresolution = 41\n";

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("thresholds at mu = 0") {
  const CommandContext ctx = context(std::string(kSmall) + "[params]\nmu = 0\n", "thr0");
  CHECK(cmd_thresholds(ctx) == kExitOk);
  const std::string report = slurp(ctx.out_dir, "report.txt");
  CHECK(report.find("theta_star: 0\n") != std::string::npos);
  CHECK(report.find("theta0: 2\n") != std::string::npos);
  const auto csv = lines(slurp(ctx.out_dir, "thresholds.csv"));
  REQUIRE(csv.size() == 2);
  CHECK(csv[0] == "theta,mu,theta0,theta_star,theta1,theta_neg,regime");
}

TEST_CASE("thresholds for mu <= -c/m") {
  const CommandContext ctx = context(std::string(kSmall) + "[params]\nmu = -2\ntheta = 1.5\n", "thrneg");
  CHECK(cmd_thresholds(ctx) == kExitOk);
  const std::string report = slurp(ctx.out_dir, "report.txt");
  CHECK(report.find("regime: PREDATOR_EXTINCT") != std::string::npos);
  CHECK(report.find("theta_neg: undefined") != std::string::npos);
}

TEST_CASE("steady: prey safe and coexistence") {
  CommandContext safe = context(std::string(kSmall) + "[params]\ntheta = 2.1\nmu = 5\n", "safe");
  CHECK(run_command("steady", safe) == kExitOk);
  const std::string report = slurp(safe.out_dir, "report.txt");
  CHECK(report.find("status: CONVERGED") != std::string::npos);
  const auto csv = lines(slurp(safe.out_dir, "state.csv"));
  CHECK(csv.front() == "node,x,u,v");
  CHECK(csv.size() == 42);

  CommandContext co = context(std::string(kSmall) + "[params]\ntheta = 0.7\nmu = 1\n", "coex");
  CHECK(cmd_steady(co) == kExitOk);
  const std::string r2 = slurp(co.out_dir, "report.txt");
  CHECK(r2.find("outcome: COEXISTENCE") != std::string::npos);
  CHECK(r2.find("apriori: PASS") != std::string::npos);
  // v is undefined strictly inside the zone.
  CHECK(slurp(co.out_dir, "state.csv").find(",nan\n") != std::string::npos);
}

TEST_CASE("steady: timeout path") {
  const CommandContext ctx =
      context(std::string(kSmall) + "[params]\ntheta = 0.7\n[solver]\nt_max = 0.01\nnewton_max_steps = 1\n", "timeout");
  CHECK(cmd_steady(ctx) == kExitSolverFailed);
  const auto csv = lines(slurp(ctx.out_dir, "state.csv"));
  REQUIRE(csv.size() > 2);
  CHECK(csv[0].rfind("# NOT_CONVERGED", 0) == 0);
  CHECK(csv[1] == "node,x,u,v");
  CHECK(slurp(ctx.out_dir, "report.txt").find("NOT_CONVERGED") != std::string::npos);
}

TEST_CASE("sweep: default grid, bifurcation line, determinism") {
  const std::string cfg = std::string(kSmall) + "[params]\nmu = 1\n";
  const CommandContext a = context(cfg, "sweep_a");
  CHECK(cmd_sweep(a) == kExitOk);
  const auto csv = lines(slurp(a.out_dir, "branch.csv"));
  CHECK(csv.size() == 41);
  CHECK(csv[0] == "parameter,min_u,max_u,min_v,max_v,residual,outcome,eta_re,status");
  const auto bif = lines(slurp(a.out_dir, "bifurcation.csv"));
  REQUIRE(bif.size() == 2);
  CHECK(bif[0] == "theta_hat,theta_star_predicted,rel_gap");
  const double gap = std::stod(bif[1].substr(bif[1].rfind(',') + 1));
  CHECK(gap < 0.02);

  const CommandContext b = context(cfg, "sweep_b");
  CHECK(cmd_sweep(b) == kExitOk);
  CHECK(slurp(a.out_dir, "branch.csv") == slurp(b.out_dir, "branch.csv"));
  CHECK(slurp(a.out_dir, "report.txt") == slurp(b.out_dir, "report.txt"));
}

TEST_CASE("zones: six rows, strictly decreasing") {
  CommandContext ctx = context("[domain]\nresolution = 101\n", "zones");
  ctx.threads = 2;
  CHECK(cmd_zones(ctx) == kExitOk);
  const auto csv = lines(slurp(ctx.out_dir, "zones.csv"));
  REQUIRE(csv.size() == 7);
  double previous = INFINITY;
  for (std::size_t i = 1; i < csv.size(); ++i) {
    std::stringstream ss(csv[i]);
    std::string w, m, t;
    std::getline(ss, w, ',');
    std::getline(ss, m, ',');
    std::getline(ss, t, ',');
    CHECK(std::stod(t) < previous);
    previous = std::stod(t);
  }
}

TEST_CASE("asymptotic: four rows") {
  const CommandContext ctx = context(std::string(kSmall) + "[params]\ntheta = 1.5\n", "asym");
  CHECK(cmd_asymptotic(ctx) == kExitOk);
  const auto csv = lines(slurp(ctx.out_dir, "asymptotic.csv"));
  CHECK(csv.size() == 5);
  const CommandContext low = context(std::string(kSmall) + "[params]\ntheta = 0.5\n", "asymlow");
  CHECK(cmd_asymptotic(low) == kExitConfigError);
}

TEST_CASE("verify: loosened eigen tolerance fails the eigenvalue check") {
  VerifyOptions o;
  o.solver.eigen_tol = 1e-2;
  o.only = {1};
  const VerifyReport r = run_verify(o);
  REQUIRE(r.criteria.size() == 1);
  CHECK_FALSE(r.criteria[0].pass);
  o.solver.eigen_tol = 1e-10;
  CHECK(run_verify(o).all_pass());
}

TEST_CASE("dispatch and CSV quoting") {
  CommandContext ctx;
  CHECK(run_command("bogus", ctx) == kExitConfigError);
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
}

}
