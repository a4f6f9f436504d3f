// fracsmo: command-line front end for the fractional-order sliding mode
// observer simulator.
//
//   fracsmo simulate <config>      co-simulate, write CSV + SVG figures, print metrics
//   fracsmo check-gains <config>   evaluate the gain conditions against plant bounds
//   fracsmo verify <config>        check the fractional Lyapunov inequality on the errors
//   fracsmo gl-test                run the GL analytic-oracle suite
//
// Exit codes: 0 success (non-convergence is a result), 1 config error,
// 2 divergence, 3 internal error.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fracsmo/config.hpp"
#include "fracsmo/errors.hpp"
#include "fracsmo/oracles.hpp"
#include "fracsmo/simulation.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kDiverged = 2, kInternal = 3 };

struct Common {
  std::string config_path;
  std::string preset;
  std::optional<double> h;
  std::optional<double> horizon;
  std::string out_dir = ".";
  std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c) {
  // -h belongs to the step size, not to help.
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("config", c.config_path, "Scenario file");
  cmd->add_option("--preset", c.preset, "Built-in scenario (paper-example)");
  cmd->add_option("--h", c.h, "Step size [s]");
  cmd->add_option("--horizon", c.horizon, "Simulated time [s]");
  cmd->add_option("--out-dir", c.out_dir, "Directory for CSV and SVG output");
  cmd->add_option("--format", c.format, "Report format: text or kv")
      ->check(CLI::IsMember({"text", "kv"}));
}

fracsmo::ScenarioConfig resolve(const Common& c) {
  using fracsmo::ConfigError;
  fracsmo::ScenarioConfig cfg;
  if (!c.config_path.empty()) {
    cfg = fracsmo::load_config_file(c.config_path);
  } else if (c.preset == fracsmo::kPaperPreset) {
    cfg = fracsmo::paper_example();
  } else if (!c.preset.empty()) {
    throw ConfigError("unknown preset '" + c.preset + "'", 0);
  } else {
    throw ConfigError("no config file or --preset given", 0);
  }
  if (c.h) cfg.sim.h = *c.h;
  if (c.horizon) cfg.sim.horizon = *c.horizon;
  cfg.validate();
  return cfg;
}

fracsmo::ReportFormat format_of(const Common& c) {
  return c.format == "kv" ? fracsmo::ReportFormat::KeyValue : fracsmo::ReportFormat::Text;
}

int gl_test() {
  bool ok = true;
  for (const auto& check : fracsmo::oracles::gl_oracle_suite()) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << std::left << std::setw(58) << check.name
              << " error " << std::setprecision(6) << check.error << " (tolerance "
              << check.tolerance << ")\n";
    ok &= check.passed;
  }
  return ok ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional-order step-by-step super-twisting observer simulator"};
  app.require_subcommand(1);

  Common sim_opts, gains_opts, verify_opts;
  auto* simulate = app.add_subcommand("simulate", "Run plant and observer, write CSV/SVG");
  add_common(simulate, sim_opts);
  auto* check = app.add_subcommand("check-gains", "Evaluate the observer gain conditions");
  add_common(check, gains_opts);
  auto* verify = app.add_subcommand("verify", "Check the fractional Lyapunov inequality");
  add_common(verify, verify_opts);
  auto* gltest = app.add_subcommand("gl-test", "Run the GL analytic-oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (gltest->parsed()) return gl_test();
    if (simulate->parsed()) {
      const auto cfg = resolve(sim_opts);
      return fracsmo::run_simulate(cfg, sim_opts.out_dir, std::cout, format_of(sim_opts))
          .exit_code;
    }
    if (check->parsed()) {
      fracsmo::run_check_gains(resolve(gains_opts), std::cout, format_of(gains_opts));
      return kOk;
    }
    if (verify->parsed()) {
      fracsmo::run_verify(resolve(verify_opts), std::cout, format_of(verify_opts));
      return kOk;
    }
  } catch (const fracsmo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fracsmo::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const fracsmo::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
