#pragma once

// Plant/observer co-simulation and the reports built on top of it.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracsmo/analysis.hpp"
#include "fracsmo/config.hpp"
#include "fracsmo/svg.hpp"
#include "fracsmo/trajectory.hpp"

namespace fracsmo {

enum class ReportFormat { Text, KeyValue };

struct SimulationResult {
  Trajectory trajectory;
  std::optional<std::string> divergence;  // set when the run stopped early
  double divergence_time = 0.0;
};

/// Runs round(horizon / h) steps. Within a step the plant advances first and
/// the observer is driven by the freshly computed output. Row k holds the
/// state at t_k together with the flags applied in step k. Divergence stops
/// the run and is reported in the result rather than thrown.
SimulationResult simulate(const ScenarioConfig& config);

/// Figure analogs: per state an estimate plot and an error plot, then the
/// fault and its estimation error. Names are SVG file names.
std::vector<std::pair<std::string, Plot>> figure_plots(const Trajectory& traj);

struct SimulateOutcome {
  SimulationResult result;
  Metrics metrics;
  std::filesystem::path csv_path;
  std::vector<std::filesystem::path> svg_paths;
  int exit_code = 0;  // 0 completed, 2 diverged
};

/// Simulates, writes the CSV and SVG figures under `out_dir`, prints metrics.
SimulateOutcome run_simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                             std::ostream& out, ReportFormat format = ReportFormat::Text);

/// Uses the configured bounds, or estimates them from a plant-only run.
GainReport run_check_gains(const ScenarioConfig& config, std::ostream& out,
                           ReportFormat format = ReportFormat::Text);

/// Simulates and checks the fractional Lyapunov inequality on (e_1..e_n, e_f).
/// Throws DivergenceError if the simulation diverges.
LemmaCheck run_verify(const ScenarioConfig& config, std::ostream& out,
                      ReportFormat format = ReportFormat::Text);

Eigen::MatrixXd lyapunov_matrix(const ScenarioConfig& config);

void print_metrics(std::ostream& out, const Metrics& metrics, ReportFormat format);
void print_gain_report(std::ostream& out, const GainReport& report, ReportFormat format);
void print_lemma_check(std::ostream& out, const LemmaCheck& check, ReportFormat format);

}  // namespace fracsmo
