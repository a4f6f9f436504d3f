#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fracsmo/config.hpp"
#include "fracsmo/errors.hpp"
#include "fracsmo/simulation.hpp"
#include "fracsmo/trajectory.hpp"

using namespace fracsmo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fracsmo_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig short_example(double horizon) {
  auto c = paper_example();
  c.sim.horizon = horizon;
  return c;
}

ScenarioConfig blow_up() {
  // D^a x2 = x2^3 from x2 = 2 escapes in finite time.
  ScenarioConfig c;
  c.plant = {2, 0.8, "x2*x2*x2", "0", "0", {0.0, 2.0}};
  c.observer.lambda = {1, 1, 1};
  c.observer.alpha_gain = {1, 1, 1};
  c.observer.epsilon = 0.1;
  c.observer.xhat0 = {0, 0};
  c.observer.xtilde0 = {0};
  c.sim.h = 1e-3;
  c.sim.horizon = 5.0;
  return c;
}

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = "cd \"" + dir.string() + "\" && \"" FRACSMO_CLI "\" " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("short run writes one row per step") {
  const auto dir = scratch("short");
  std::ostringstream out;
  const auto o = run_simulate(short_example(0.01), dir, out);
  CHECK(o.exit_code == 0);
  CHECK(o.result.trajectory.rows.size() == 10);
  std::ifstream in(o.csv_path);
  const auto t = read_csv(in);
  CHECK(t.rows.size() == 10);
  CHECK(t.rows.front().t == 0.0);
  CHECK(t.rows.back().t == doctest::Approx(0.009));
  CHECK(o.svg_paths.size() == 8);
  for (const auto& p : o.svg_paths) CHECK(fs::exists(p));
  std::string header;
  for (const auto& col : csv_header(3)) header += (header.empty() ? "" : ",") + col;
  CHECK(slurp(o.csv_path).rfind(header + "\n", 0) == 0);
}

TEST_CASE("zero gains still complete with null convergence") {
  auto c = short_example(1.0);
  c.observer.lambda.assign(4, 0.0);
  c.observer.alpha_gain.assign(4, 0.0);
  std::ostringstream out;
  const auto o = run_simulate(c, scratch("zero_gains"), out, ReportFormat::KeyValue);
  CHECK(o.exit_code == 0);
  CHECK_FALSE(o.metrics.at("e1").convergence_time.has_value());
  CHECK(out.str().find("metrics.e1.convergence_time = null") != std::string::npos);
}

TEST_CASE("divergence stops the run and keeps the partial trajectory") {
  std::ostringstream out;
  const auto o = run_simulate(blow_up(), scratch("diverge"), out);
  CHECK(o.exit_code == 2);
  REQUIRE(o.result.divergence.has_value());
  const auto rows = o.result.trajectory.rows.size();
  CHECK(rows > 10);
  CHECK(rows < blow_up().steps());
  std::ifstream in(o.csv_path);
  CHECK(read_csv(in).rows.size() == rows);
  CHECK_THROWS_AS(run_verify(blow_up(), out), DivergenceError);
}

TEST_CASE("CSV round trip is exact and output is reproducible") {
  const auto c = short_example(1.0);
  const auto traj = simulate(c).trajectory;
  std::stringstream ss;
  write_csv(ss, traj);
  const auto back = read_csv(ss);
  CHECK(back == traj);

  std::ostringstream out;
  const auto a = run_simulate(c, scratch("repro_a"), out);
  const auto b = run_simulate(c, scratch("repro_b"), out);
  CHECK(slurp(a.csv_path) == slurp(b.csv_path));
  for (std::size_t i = 0; i < a.svg_paths.size(); ++i) {
    CHECK(slurp(a.svg_paths[i]) == slurp(b.svg_paths[i]));
  }
}

TEST_CASE("CSV reader rejects malformed input") {
  std::istringstream wrong_header("t,x1\n0,1\n");
  CHECK_THROWS(read_csv(wrong_header));
  std::stringstream ss;
  write_csv(ss, simulate(short_example(0.005)).trajectory);
  std::string text = ss.str();
  text += "0,1,2\n";
  std::istringstream short_row(text);
  CHECK_THROWS(read_csv(short_row));
}

TEST_CASE("configured bounds override the estimate") {
  auto c = short_example(1.0);
  Bounds b;
  b.a = {0.1, 0.1, 0.1};
  b.A1 = b.A2 = b.A3 = 0.1;
  b.Adot1 = b.Adot2 = b.Adot3 = 0.01;
  c.bounds = b;
  std::ostringstream out;
  const auto r = run_check_gains(c, out, ReportFormat::KeyValue);
  CHECK(r.bounds == b);
  CHECK(out.str().find("bounds.source = config") != std::string::npos);
  CHECK(r.channels[0].disturbance_bound == 0.1);
}

TEST_CASE("verify") {
  std::ostringstream out;
  auto c = short_example(2.0);
  c.plant.alpha = 1.0 - 1e-9;
  const auto check = run_verify(c, out);
  CHECK(check.max_violation <= check.tolerance);
  CHECK(check.samples == 2000);

  auto one_row = short_example(0.0014);  // rounds to a single step
  CHECK_THROWS_AS(run_verify(one_row, out), PreconditionError);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("binary");
  CHECK(run_cli("gl-test", dir) == 0);
  CHECK(slurp(dir / "stdout.txt").find("FAIL") == std::string::npos);
  CHECK(run_cli("--help", dir) == 0);
  CHECK(run_cli("simulate --help", dir) == 0);

  CHECK(run_cli("simulate --preset paper-example --horizon 0.01 --h 0.001", dir) == 0);
  std::ifstream csv(dir / "trajectory.csv");
  CHECK(read_csv(csv).rows.size() == 10);

  CHECK(run_cli("simulate", dir) == 1);
  CHECK(run_cli("simulate missing.cfg", dir) == 1);
  CHECK(run_cli("simulate --preset nope", dir) == 1);
  CHECK(run_cli("frobnicate", dir) == 1);
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "preset = \"paper-example\"\n[observer]\nlambda = 0.1, 0.1, 0.1\n";
  }
  CHECK(run_cli("check-gains bad.cfg", dir) == 1);
  CHECK(slurp(dir / "stderr.txt").find("line 3: observer.lambda") != std::string::npos);

  {
    std::ofstream cfg(dir / "diverge.cfg");
    cfg << to_text(blow_up());
  }
  CHECK(run_cli("simulate diverge.cfg", dir) == 2);
  CHECK(run_cli("verify diverge.cfg", dir) == 2);
  CHECK(run_cli("verify --preset paper-example --horizon 0.0014", dir) == 3);

  CHECK(run_cli("check-gains --preset paper-example --horizon 2 --format kv", dir) == 0);
  CHECK(slurp(dir / "stdout.txt").find("channel4.source = heuristic") != std::string::npos);
  CHECK(run_cli("verify --preset paper-example --horizon 1 --format kv", dir) == 0);
  CHECK(slurp(dir / "stdout.txt").find("lemma.violations = 0") != std::string::npos);
}
