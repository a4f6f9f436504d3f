#pragma once

// Scenario files: line-based `key = value` pairs under `[section]` headers,
// `#` comments, comma-separated numeric lists and double-quoted strings.
//
//   preset = "paper-example"      # optional, must precede any section
//
//   [plant]      n, alpha, f1, f2, fault, x0
//   [observer]   lambda, alpha_gain, epsilon, flag_dwell_steps,
//                xhat0, xtilde0, ftilde0, fhat0, thetatilde0
//   [sim]        h, horizon, memory_length (0 = unbounded)
//   [output]     csv, svg_dir, metrics_band
//   [bounds]     a, A1, A2, A3, Adot1, Adot2, Adot3   (all or nothing)
//   [analysis]   P (row-major, (n+1)^2 entries), lemma_tolerance

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracsmo/observer.hpp"
#include "fracsmo/plant.hpp"

namespace fracsmo {

inline constexpr std::string_view kPaperPreset = "paper-example";

struct ScenarioConfig {
  struct Plant {
    std::size_t n = 0;
    double alpha = 0.0;
    std::string f1;
    std::string f2;
    std::string fault;
    std::vector<double> x0;

    bool operator==(const Plant&) const = default;
  } plant;

  struct ObserverSection {
    std::vector<double> lambda;
    std::vector<double> alpha_gain;
    double epsilon = 0.0;
    std::uint32_t flag_dwell_steps = 1;
    std::vector<double> xhat0;
    std::vector<double> xtilde0;
    double ftilde0 = 0.0;
    double fhat0 = 0.0;
    double thetatilde0 = 0.0;

    bool operator==(const ObserverSection&) const = default;
  } observer;

  struct Sim {
    double h = 1e-3;
    double horizon = 30.0;
    std::optional<std::size_t> memory_length;

    bool operator==(const Sim&) const = default;
  } sim;

  struct Output {
    std::string csv = "trajectory.csv";
    std::string svg_dir = "plots";
    std::optional<double> metrics_band;  // defaults to 2 epsilon

    bool operator==(const Output&) const = default;
  } output;

  std::optional<Bounds> bounds;

  struct Analysis {
    std::vector<double> P;  // empty means identity
    std::optional<double> lemma_tolerance;

    bool operator==(const Analysis&) const = default;
  } analysis;

  bool operator==(const ScenarioConfig&) const = default;

  PlantModel plant_model() const;
  GainSet gains() const;
  ObserverState observer_initial_state() const;
  double metrics_band() const;
  std::size_t steps() const;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses and validates. Errors carry the offending line number.
ScenarioConfig load_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);

/// The built-in numerical example: alpha = 0.7, three states,
/// f = 0.5 cos(0.5 pi t), lambda = 0.1 everywhere, alpha gains 1, 2, 5, 10.
ScenarioConfig paper_example();

/// Canonical text form with every default written out. Loading it back
/// reproduces any config returned by load_config.
std::string to_text(const ScenarioConfig& config);

}  // namespace fracsmo
