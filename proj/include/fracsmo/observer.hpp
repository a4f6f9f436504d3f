#pragma once

// Second-order step-by-step sliding mode observer for the plant in
// observable canonical form. Channel i (i = 1..n) pairs x̂_i with the
// auxiliary estimate x̃_{i+1} (x̃_{n+1} is the fault estimate f̃); channel
// n+1 pairs f̂ with θ̃. Channel i >= 2 only runs while E_{i-1} = 1. The
// observer reads the plant through y = x_1 only.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fracsmo/expr.hpp"
#include "fracsmo/fraccalc.hpp"

namespace fracsmo {

struct GainSet {
  std::vector<double> lambda;      // λ_1..λ_{n+1}
  std::vector<double> alpha_gain;  // α_1..α_{n+1}
  double epsilon = 0.0;            // activation band ε

  /// Throws PreconditionError unless both gain lists have n + 1 finite,
  /// non-negative entries and epsilon > 0.
  void validate(std::size_t n) const;
  bool all_positive() const;
};

struct ErrorRecord {
  std::vector<double> e;  // e_1..e_n, e_1 = y - x̂_1
  double e_f = 0.0;       // f̃ - f̂
};

struct ObserverState {
  std::vector<double> xhat;    // x̂_1..x̂_n
  std::vector<double> xtilde;  // x̃_2..x̃_n
  double fhat = 0.0;
  double ftilde = 0.0;
  double thetatilde = 0.0;
  std::vector<bool> flags;  // E_1..E_n used by the step that produced this state
  std::vector<std::uint32_t> streak;  // consecutive steps each band condition has held

  static ObserverState zero(std::size_t n);

  std::size_t dimension() const { return xhat.size(); }

  /// Variables in integration order:
  /// x̂_1..x̂_n, x̃_2..x̃_n, f̃, f̂, θ̃ (2n + 2 entries).
  std::vector<double> pack() const;
  void unpack(std::span<const double> values);
};

/// Index helpers into the packed layout.
namespace observer_layout {
inline std::size_t xhat(std::size_t i) { return i - 1; }                  // i = 1..n
inline std::size_t xtilde(std::size_t n, std::size_t i) { return n + i - 2; }  // i = 2..n
inline std::size_t ftilde(std::size_t n) { return 2 * n - 1; }
inline std::size_t fhat(std::size_t n) { return 2 * n; }
inline std::size_t thetatilde(std::size_t n) { return 2 * n + 1; }
inline std::size_t size(std::size_t n) { return 2 * n + 2; }
}  // namespace observer_layout

ErrorRecord compute_errors(const ObserverState& state, double y);

/// E_i = 1 iff |e_j| <= epsilon for every j <= i. Recomputed from scratch.
std::vector<bool> update_flags(const ErrorRecord& errors, double epsilon);

/// D^a right-hand sides of all observer variables (packed layout), using the
/// flags already stored in `state`.
std::vector<double> observer_rhs(const ObserverState& state, double y, const Expr& f1,
                                 const Expr& f2, const GainSet& gains, double time = 0.0);

/// Gate of each packed variable for the given flags: false means the
/// variable is held at its current value for this step.
std::vector<bool> channel_enabled(const std::vector<bool>& flags);

struct ObserverStepInput {
  const Expr& f1;
  const Expr& f2;
  const GainSet& gains;
  const GLWeights& weights;
  std::uint32_t flag_dwell_steps = 1;
  double time = 0.0;
};

/// One observer step: flags from the current errors (with dwell), then a GL
/// step of every enabled variable; disabled variables keep their value.
/// `histories` follow the packed layout and are not modified.
ObserverState observer_step(const ObserverState& state, std::span<const GLHistory> histories,
                            double y, const ObserverStepInput& in);

/// Owns the observer histories and commits each step.
class Observer {
 public:
  Observer(Expr f1, Expr f2, GainSet gains, FractionalOrder alpha, double step,
           ObserverState initial, std::uint32_t flag_dwell_steps = 1,
           std::optional<std::size_t> memory_length = std::nullopt,
           std::size_t expected_steps = 0);

  const ObserverState& state() const { return state_; }
  const GainSet& gains() const { return gains_; }

  /// Advances with the plant output `y`; `time` is the start of the step.
  const ObserverState& step(double y, double time);

 private:
  Expr f1_;
  Expr f2_;
  GainSet gains_;
  GLWeights weights_;
  std::uint32_t dwell_;
  std::vector<GLHistory> histories_;
  ObserverState state_;
};

}  // namespace fracsmo
