#include "fracsmo/simulation.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "fracsmo/errors.hpp"
#include "fracsmo/observer.hpp"
#include "fracsmo/plant.hpp"

namespace fracsmo {

namespace {

std::string exact(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SimulationResult simulate(const ScenarioConfig& config) {
  config.validate();
  const PlantModel model = config.plant_model();
  const std::size_t n = model.dimension();
  const std::size_t steps = config.steps();
  const double h = config.sim.h;

  const GLWeights weights(model.order(), steps + 1);
  std::vector<GLHistory> plant_hist;
  for (std::size_t i = 0; i < n; ++i) {
    plant_hist.emplace_back(h, config.sim.memory_length);
    plant_hist.back().reserve(steps + 1);
    plant_hist.back().push(model.initial_state()[i]);
  }
  Observer observer(model.f1(), model.f2(), config.gains(), model.order(), h,
                    config.observer_initial_state(), config.observer.flag_dwell_steps,
                    config.sim.memory_length, steps);

  SimulationResult result;
  result.trajectory.n = n;
  result.trajectory.rows.reserve(steps);
  std::vector<double> x = model.initial_state();

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const ObserverState before = observer.state();
    try {
      const PlantStep ps = plant_step(model, plant_hist, t, weights);
      const ObserverState& after = observer.step(ps.next[0], t);

      TrajectoryRow row;
      row.t = t;
      row.x = x;
      row.xhat = before.xhat;
      row.xtilde = before.xtilde;
      row.f = ps.fault;
      row.fhat = before.fhat;
      row.ftilde = before.ftilde;
      row.thetatilde = before.thetatilde;
      const ErrorRecord err = compute_errors(before, x[0]);
      row.e = err.e;
      row.e_f = err.e_f;
      row.flags = after.flags;
      result.trajectory.rows.push_back(std::move(row));

      for (std::size_t i = 0; i < n; ++i) plant_hist[i].push(ps.next[i]);
      x = ps.next;
    } catch (const DivergenceError& e) {
      result.divergence = e.what();
      result.divergence_time = e.time();
      break;
    }
  }
  return result;
}

std::vector<std::pair<std::string, Plot>> figure_plots(const Trajectory& traj) {
  const std::size_t n = traj.n;
  std::vector<double> t;
  for (const auto& r : traj.rows) t.push_back(r.t);
  auto column = [&](auto get) {
    std::vector<double> v;
    v.reserve(traj.rows.size());
    for (const auto& r : traj.rows) v.push_back(get(r));
    return v;
  };

  std::vector<std::pair<std::string, Plot>> plots;
  int fig = 1;
  auto name = [&](const std::string& stem) { return "fig" + std::to_string(fig++) + "_" + stem + ".svg"; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::string idx = std::to_string(i + 1);
    Plot est{"estimation of x" + idx, "t [s]", "x" + idx, t, {}};
    est.series.push_back({"x" + idx, "#1f77b4", column([&](const auto& r) { return r.x[i]; })});
    est.series.push_back({"x" + idx + " estimate", "#d62728",
                          column([&](const auto& r) { return r.xhat[i]; })});
    plots.emplace_back(name("x" + idx), std::move(est));

    Plot err{"estimation error of x" + idx, "t [s]", "error", t, {}};
    err.series.push_back({"e" + idx + " (observer)", "#2ca02c",
                          column([&](const auto& r) { return r.e[i]; })});
    err.series.push_back({"x" + idx + " - estimate", "#9467bd",
                          column([&](const auto& r) { return r.x[i] - r.xhat[i]; })});
    plots.emplace_back(name("e" + idx), std::move(err));
  }
  Plot fault{"estimation of f", "t [s]", "f", t, {}};
  fault.series.push_back({"f", "#1f77b4", column([](const auto& r) { return r.f; })});
  fault.series.push_back({"f estimate", "#d62728", column([](const auto& r) { return r.fhat; })});
  plots.emplace_back(name("fault"), std::move(fault));

  Plot ferr{"estimation error of f", "t [s]", "f - f estimate", t, {}};
  ferr.series.push_back(
      {"f - f estimate", "#2ca02c", column([](const auto& r) { return r.f - r.fhat; })});
  plots.emplace_back(name("fault_error"), std::move(ferr));
  return plots;
}

SimulateOutcome run_simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                             std::ostream& out, ReportFormat format) {
  SimulateOutcome o;
  o.result = simulate(config);
  const auto& traj = o.result.trajectory;

  std::filesystem::create_directories(out_dir);
  o.csv_path = out_dir / config.output.csv;
  if (o.csv_path.has_parent_path()) std::filesystem::create_directories(o.csv_path.parent_path());
  {
    std::ofstream csv(o.csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + o.csv_path.string());
    write_csv(csv, traj);
  }

  if (o.result.divergence) {
    out << "diverged: " << *o.result.divergence << '\n'
        << "partial trajectory (" << traj.rows.size() << " rows) written to " << o.csv_path.string()
        << '\n';
    o.exit_code = 2;
    return o;
  }

  const auto svg_dir = out_dir / config.output.svg_dir;
  std::filesystem::create_directories(svg_dir);
  for (const auto& [file, plot] : figure_plots(traj)) {
    o.svg_paths.push_back(svg_dir / file);
    write_svg(o.svg_paths.back().string(), plot);
  }

  o.metrics = compute_metrics(traj, config.metrics_band());
  if (format == ReportFormat::Text) {
    out << "simulated " << traj.rows.size() << " steps (h = " << g6(config.sim.h)
        << ", horizon = " << g6(config.sim.horizon) << ")\n"
        << "csv: " << o.csv_path.string() << '\n'
        << "figures: " << svg_dir.string() << " (" << o.svg_paths.size() << " files)\n";
  }
  print_metrics(out, o.metrics, format);
  return o;
}

GainReport run_check_gains(const ScenarioConfig& config, std::ostream& out, ReportFormat format) {
  config.validate();
  Bounds bounds;
  if (config.bounds) {
    bounds = *config.bounds;
  } else {
    bounds = estimate_bounds(config.plant_model(), config.sim.horizon, config.sim.h,
                             config.sim.memory_length);
  }
  const auto report = check_gains(config.gains(), bounds);
  if (format == ReportFormat::Text) {
    out << "bounds: " << (config.bounds ? "user supplied" : "estimated from plant trajectory")
        << '\n';
  } else {
    out << "bounds.source = " << (config.bounds ? "config" : "estimated") << '\n';
  }
  print_gain_report(out, report, format);
  return report;
}

Eigen::MatrixXd lyapunov_matrix(const ScenarioConfig& config) {
  const auto m = static_cast<Eigen::Index>(config.plant.n + 1);
  if (config.analysis.P.empty()) return Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd P(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) P(r, c) = config.analysis.P[r * m + c];
  return P;
}

LemmaCheck run_verify(const ScenarioConfig& config, std::ostream& out, ReportFormat format) {
  const auto sim = simulate(config);
  if (sim.divergence) throw DivergenceError(*sim.divergence, sim.divergence_time);
  const auto errors = error_vectors(sim.trajectory);
  const auto check = verify_lemma1(errors, lyapunov_matrix(config),
                                   FractionalOrder(config.plant.alpha), config.sim.h,
                                   config.analysis.lemma_tolerance, 0.0, config.sim.memory_length);
  print_lemma_check(out, check, format);
  return check;
}

void print_metrics(std::ostream& out, const Metrics& m, ReportFormat format) {
  if (format == ReportFormat::KeyValue) {
    out << "metrics.band = " << exact(m.band) << '\n';
    for (const auto& s : m.signals) {
      const std::string p = "metrics." + s.name + ".";
      out << p << "convergence_time = "
          << (s.convergence_time ? exact(*s.convergence_time) : std::string("null")) << '\n'
          << p << "rmse_tail = " << exact(s.rmse_tail) << '\n'
          << p << "sup_error_tail = " << exact(s.sup_error_tail) << '\n';
    }
    return;
  }
  out << "metrics (band " << g6(m.band) << "):\n";
  for (const auto& s : m.signals) {
    out << "  " << s.name << ": converged "
        << (s.convergence_time ? "at t = " + g6(*s.convergence_time) : std::string("never"))
        << ", tail rmse " << g6(s.rmse_tail) << ", tail sup " << g6(s.sup_error_tail) << '\n';
  }
}

void print_gain_report(std::ostream& out, const GainReport& r, ReportFormat format) {
  const auto& b = r.bounds;
  if (format == ReportFormat::KeyValue) {
    for (std::size_t i = 0; i < b.a.size(); ++i)
      out << "bounds.a" << i + 1 << " = " << exact(b.a[i]) << '\n';
    out << "bounds.A1 = " << exact(b.A1) << "\nbounds.A2 = " << exact(b.A2)
        << "\nbounds.A3 = " << exact(b.A3) << "\nbounds.Adot1 = " << exact(b.Adot1)
        << "\nbounds.Adot2 = " << exact(b.Adot2) << "\nbounds.Adot3 = " << exact(b.Adot3) << '\n';
    for (const auto& c : r.channels) {
      const std::string p = "channel" + std::to_string(c.channel) + ".";
      out << p << "source = " << to_string(c.source) << '\n'
          << p << "disturbance = " << c.disturbance << '\n'
          << p << "disturbance_bound = " << exact(c.disturbance_bound) << '\n'
          << p << "condition_1 = " << (c.condition_1_holds ? "pass" : "fail") << '\n'
          << p << "condition_1_margin = " << exact(c.condition_1_margin) << '\n'
          << p << "condition_2 = "
          << (!c.condition_2_evaluated ? "skipped" : c.condition_2_holds ? "pass" : "fail") << '\n';
      if (c.condition_2_evaluated) {
        out << p << "lambda_threshold = " << exact(c.lambda_threshold) << '\n'
            << p << "condition_2_margin = " << exact(c.condition_2_margin) << '\n';
      }
    }
    out << "all_conditions_hold = " << (r.all_hold() ? "true" : "false") << '\n';
    return;
  }
  out << "bounds: a = (";
  for (std::size_t i = 0; i < b.a.size(); ++i) out << (i ? ", " : "") << g6(b.a[i]);
  out << "), A1 = " << g6(b.A1) << ", A2 = " << g6(b.A2) << ", A3 = " << g6(b.A3)
      << ", Adot1 = " << g6(b.Adot1) << ", Adot2 = " << g6(b.Adot2) << ", Adot3 = " << g6(b.Adot3)
      << '\n';
  for (const auto& c : r.channels) {
    out << "channel " << c.channel << " [" << to_string(c.source) << "]\n"
        << "  D = " << c.disturbance << " = " << g6(c.disturbance_bound) << '\n'
        << "  alpha_" << c.channel << " = " << g6(c.alpha_gain) << " > D: "
        << (c.condition_1_holds ? "holds" : "FAILS") << " (margin " << g6(c.condition_1_margin)
        << ")\n";
    if (c.condition_2_evaluated) {
      out << "  lambda_" << c.channel << " = " << g6(c.lambda) << " > " << g6(c.lambda_threshold)
          << ": " << (c.condition_2_holds ? "holds" : "FAILS") << " (lambda^2 margin "
          << g6(c.condition_2_margin) << ")\n";
    } else {
      out << "  lambda condition skipped (needs alpha > D)\n";
    }
  }
  out << (r.all_hold() ? "all conditions hold\n"
                       : "some conditions fail (advisory; the simulation may still converge)\n");
}

void print_lemma_check(std::ostream& out, const LemmaCheck& c, ReportFormat format) {
  if (format == ReportFormat::KeyValue) {
    out << "lemma.samples = " << c.samples << '\n'
        << "lemma.tolerance = " << exact(c.tolerance) << '\n'
        << "lemma.max_violation = " << exact(c.max_violation) << '\n'
        << "lemma.violations = " << c.violation_times.size() << '\n';
    return;
  }
  out << "checked 1/2 D^a(e'Pe) <= e'P D^a e on " << c.samples << " samples\n"
      << "max violation " << g6(c.max_violation) << " (tolerance " << g6(c.tolerance) << ")\n"
      << c.violation_times.size() << " samples beyond tolerance";
  if (!c.violation_times.empty()) out << ", first at t = " << g6(c.violation_times.front());
  out << '\n';
}

}  // namespace fracsmo
