#pragma once

// The monitored system in observable canonical form:
//   D^a x_i = x_{i+1}              (i < n)
//   D^a x_n = f1(x) + f2(x) f(t)
// with measured output y = x_1.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fracsmo/expr.hpp"
#include "fracsmo/fraccalc.hpp"

namespace fracsmo {

/// Any |x_i| above this declares the simulation divergent.
inline constexpr double kDivergenceGuard = 1e9;

class PlantModel {
 public:
  /// Throws PreconditionError when n < 2, x0 has the wrong length, f1/f2
  /// reference a state beyond x_n, or the fault references the state.
  PlantModel(std::size_t n, FractionalOrder alpha, Expr f1, Expr f2, Expr fault,
             std::vector<double> x0);

  std::size_t dimension() const { return n_; }
  FractionalOrder order() const { return alpha_; }
  const Expr& f1() const { return f1_; }
  const Expr& f2() const { return f2_; }
  const Expr& fault() const { return fault_; }
  const std::vector<double>& initial_state() const { return x0_; }

  double fault_at(double t) const;

  /// Writes (x_2, ..., x_n, f1(x) + f2(x) f) into `out` and returns f(t).
  double rhs(std::span<const double> x, double t, std::span<double> out) const;

 private:
  std::size_t n_;
  FractionalOrder alpha_;
  Expr f1_;
  Expr f2_;
  Expr fault_;
  std::vector<double> x0_;
};

/// Constants assumed by the stability analysis: |x_i| < a_i, |f| < A1,
/// |f1| < A2, |f2| < A3 and the same for their D^a magnitudes (Adot*).
struct Bounds {
  std::vector<double> a;
  double A1 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
  double Adot1 = 0.0;
  double Adot2 = 0.0;
  double Adot3 = 0.0;

  /// Throws PreconditionError unless every entry is finite and > 0.
  void validate() const;

  bool operator==(const Bounds&) const = default;
};

struct PlantStep {
  std::vector<double> next;
  double fault = 0.0;
};

/// Advances the plant from the latest samples in `histories` (evaluated at
/// `time`). Histories are left untouched. Throws DivergenceError past the
/// guard; expression failures are rethrown with the state and time attached.
PlantStep plant_step(const PlantModel& model, std::span<const GLHistory> histories, double time,
                     const GLWeights& weights);
PlantStep plant_step(const PlantModel& model, std::span<const GLHistory> histories, double time);

struct PlantTrajectory {
  double step = 0.0;
  std::vector<std::vector<double>> states;  // samples 0..N
  std::vector<double> fault;
  std::vector<double> f1;
  std::vector<double> f2;
};

PlantTrajectory simulate_plant(const PlantModel& model, double horizon, double step,
                               std::optional<std::size_t> memory_length = std::nullopt);

/// Trajectory sup norms times 1.2 (floored at 1e-6) of the states, the
/// fault, f1, f2 and their GL derivatives.
Bounds estimate_bounds(const PlantModel& model, double horizon, double step,
                       std::optional<std::size_t> memory_length = std::nullopt);

}  // namespace fracsmo
