#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracsmo/fraccalc.hpp"
#include "fracsmo/observer.hpp"
#include "fracsmo/plant.hpp"
#include "fracsmo/trajectory.hpp"

namespace fracsmo {

// ---------------------------------------------------------------------------
// Gain conditions
//
// For channel i with disturbance bound D (the bound on the term that
// perturbs the e_i dynamic), finite-time convergence of the super-twisting
// pair requires
//   alpha_i > D
//   lambda_i^2 > 4 D (alpha_i + D) / (alpha_i - D).
// Channel 1 of an n >= 3 plant uses D = a_3 directly; the other channels
// reuse the same form with the bound of whatever perturbs them.
// ---------------------------------------------------------------------------

enum class ConditionSource {
  Derived,       // channel 1, perturbation x_3
  Extrapolated,  // same conditions carried to later channels
  Heuristic,     // fault channel, no published condition
};

std::string to_string(ConditionSource s);

struct ChannelCondition {
  std::size_t channel = 0;  // 1..n+1
  ConditionSource source = ConditionSource::Extrapolated;
  std::string disturbance;  // symbolic form of D
  double disturbance_bound = 0.0;
  double alpha_gain = 0.0;
  double lambda = 0.0;

  bool condition_1_holds = false;
  double condition_1_margin = 0.0;  // alpha_i - D

  bool condition_2_evaluated = false;
  double lambda_threshold = 0.0;  // sqrt(4 D (alpha_i + D) / (alpha_i - D))
  bool condition_2_holds = false;
  double condition_2_margin = 0.0;  // lambda_i^2 - threshold^2
};

struct GainReport {
  std::vector<ChannelCondition> channels;
  Bounds bounds;

  bool all_hold() const;
};

/// Advisory check of every channel; never throws on failing conditions.
GainReport check_gains(const GainSet& gains, const Bounds& bounds);

/// Threshold sqrt(4 D (alpha + D) / (alpha - D)); requires alpha > D.
double lambda_threshold(double alpha_gain, double disturbance_bound);

// ---------------------------------------------------------------------------
// Fractional Lyapunov inequality ½ D^a(eᵀPe) <= eᵀ P D^a e
// ---------------------------------------------------------------------------

struct LemmaCheck {
  Eigen::MatrixXd P;
  double tolerance = 0.0;
  double max_violation = 0.0;  // max(0, max_k lhs_k - rhs_k)
  std::vector<double> violation_times;
  std::size_t samples = 0;
};

/// Throws PreconditionError unless P is square, symmetric and positive definite.
void validate_spd(const Eigen::MatrixXd& P);

/// 10 h^min(a, 1-a).
double default_lemma_tolerance(FractionalOrder alpha, double step);

/// `errors[k]` is e at time t0 + k h. Both sides use the GL derivative with
/// the Caputo shift. Throws PreconditionError for fewer than 2 samples or a
/// P of the wrong size.
LemmaCheck verify_lemma1(std::span<const std::vector<double>> errors, const Eigen::MatrixXd& P,
                         FractionalOrder alpha, double step,
                         std::optional<double> tolerance = std::nullopt, double t0 = 0.0,
                         std::optional<std::size_t> memory_length = std::nullopt);

/// Error vectors (e_1..e_n, e_f) of every row.
std::vector<std::vector<double>> error_vectors(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Convergence metrics
// ---------------------------------------------------------------------------

struct SignalMetrics {
  std::string name;
  std::optional<double> convergence_time;  // first entry into the band with no later exit
  double rmse_tail = 0.0;                  // over the final half of the samples
  double sup_error_tail = 0.0;
};

struct Metrics {
  double band = 0.0;
  std::vector<SignalMetrics> signals;

  const SignalMetrics& at(const std::string& name) const;
};

SignalMetrics signal_metrics(std::string name, std::span<const double> t,
                             std::span<const double> error, double band);

/// Metrics for e_1..e_n and e_fault = f - f̂.
Metrics compute_metrics(const Trajectory& traj, double band);

}  // namespace fracsmo
