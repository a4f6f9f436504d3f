#pragma once

// Grünwald–Letnikov fractional differintegration on uniform grids.
//
// All signals are treated in the Caputo sense: the GL convolution is applied to
// x(t) - x(0), so initial conditions are values of the function itself and the
// derivative of a constant is zero.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fracsmo {

/// Commensurate derivative order, restricted to the open interval (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);

  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Coefficients w_j = (-1)^j binom(alpha, j) of the GL sum, j = 0..count.
class GLWeights {
 public:
  GLWeights(FractionalOrder alpha, std::size_t count);

  FractionalOrder order() const { return alpha_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t j) const { return w_[j]; }
  std::span<const double> values() const { return w_; }

  /// Extends the table so that w_0..w_count are available.
  void ensure(std::size_t count);

 private:
  FractionalOrder alpha_;
  std::vector<double> w_;
};

GLWeights gl_weights(FractionalOrder alpha, std::size_t count);

/// Uniformly sampled signal history with an optional short-memory window.
class GLHistory {
 public:
  explicit GLHistory(double step, std::optional<std::size_t> memory_length = std::nullopt);

  void push(double value) { samples_.push_back(value); }
  void reserve(std::size_t n) { samples_.reserve(n); }

  double step() const { return step_; }
  std::optional<std::size_t> memory_length() const { return memory_length_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::span<const double> samples() const { return samples_; }
  double initial() const { return samples_.front(); }
  double latest() const { return samples_.back(); }

  /// Σ_{j=first}^{last} w_j (x[index - j] - x[0]), with `last` clipped by
  /// min(index, memory_length).
  double shifted_sum(const GLWeights& w, std::size_t index, std::size_t first) const;

 private:
  double step_;
  std::optional<std::size_t> memory_length_;
  std::vector<double> samples_;
};

/// GL estimate of D^alpha at the latest sample of `signal`.
double gl_derivative(const GLHistory& signal, const GLWeights& weights);
double gl_derivative(const GLHistory& signal, FractionalOrder alpha);

/// GL derivative at every sample of a uniformly spaced signal.
std::vector<double> gl_derivative_series(std::span<const double> signal, double step,
                                         FractionalOrder alpha,
                                         std::optional<std::size_t> memory_length = std::nullopt);

/// One explicit GL step for D^alpha x_i = g_i. Returns x_i[k+1] for every
/// history; the histories are not modified.
std::vector<double> gl_step(std::span<const GLHistory> histories,
                            std::span<const double> rhs_values, const GLWeights& weights);
std::vector<double> gl_step(std::span<const GLHistory> histories,
                            std::span<const double> rhs_values, FractionalOrder alpha);

/// Right-hand side g(x, t) written into `out`.
using FdeRhs =
    std::function<void(std::span<const double> x, double t, std::span<double> out)>;

/// Integrates D^alpha x = g(x, t) from x(0) = x0 for `steps` steps of size h.
/// Returns steps + 1 state vectors.
std::vector<std::vector<double>> integrate_fde(const FdeRhs& rhs, std::span<const double> x0,
                                               FractionalOrder alpha, double step,
                                               std::size_t steps,
                                               std::optional<std::size_t> memory_length = std::nullopt);

}  // namespace fracsmo
