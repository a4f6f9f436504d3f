#include "fracsmo/fraccalc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracsmo/errors.hpp"

namespace fracsmo {

namespace {

// Σ_{j=first}^{last} w[j] * (x[index - j] - x0). Four accumulators break the
// add dependency chain; the summation order is fixed so results are
// reproducible.
double weighted_tail(const double* w, const double* x, std::size_t index, std::size_t first,
                     std::size_t last, double x0) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = first;
  for (; j + 3 <= last; j += 4) {
    s0 += w[j] * (x[index - j] - x0);
    s1 += w[j + 1] * (x[index - j - 1] - x0);
    s2 += w[j + 2] * (x[index - j - 2] - x0);
    s3 += w[j + 3] * (x[index - j - 3] - x0);
  }
  for (; j <= last; ++j) s0 += w[j] * (x[index - j] - x0);
  return (s0 + s1) + (s2 + s3);
}

std::size_t window_end(std::size_t index, std::optional<std::size_t> memory_length) {
  return memory_length ? std::min(index, *memory_length) : index;
}

}  // namespace

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("fractional order must lie in (0, 1), got " + std::to_string(alpha));
  }
}

GLWeights::GLWeights(FractionalOrder alpha, std::size_t count) : alpha_(alpha), w_{1.0} {
  ensure(count);
}

void GLWeights::ensure(std::size_t count) {
  if (w_.size() > count) return;
  const double a1 = alpha_.value() + 1.0;
  w_.reserve(count + 1);
  for (std::size_t j = w_.size(); j <= count; ++j) {
    w_.push_back(w_.back() * (1.0 - a1 / static_cast<double>(j)));
  }
}

GLWeights gl_weights(FractionalOrder alpha, std::size_t count) { return GLWeights(alpha, count); }

GLHistory::GLHistory(double step, std::optional<std::size_t> memory_length)
    : step_(step), memory_length_(memory_length) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw PreconditionError("GL history step must be positive and finite");
  }
  if (memory_length && *memory_length == 0) {
    throw PreconditionError("short-memory length must be positive");
  }
}

double GLHistory::shifted_sum(const GLWeights& w, std::size_t index, std::size_t first) const {
  const std::size_t last = window_end(index, memory_length_);
  if (first > last) return 0.0;
  if (w.size() <= last) {
    throw PreconditionError("GL weight table too short for history");
  }
  return weighted_tail(w.values().data(), samples_.data(), index, first, last, samples_.front());
}

double gl_derivative(const GLHistory& signal, const GLWeights& weights) {
  if (signal.empty()) throw PreconditionError("gl_derivative needs at least one sample");
  const std::size_t k = signal.size() - 1;
  const double alpha = weights.order().value();
  return signal.shifted_sum(weights, k, 0) / std::pow(signal.step(), alpha);
}

double gl_derivative(const GLHistory& signal, FractionalOrder alpha) {
  if (signal.empty()) throw PreconditionError("gl_derivative needs at least one sample");
  const GLWeights w(alpha, window_end(signal.size() - 1, signal.memory_length()));
  return gl_derivative(signal, w);
}

std::vector<double> gl_derivative_series(std::span<const double> signal, double step,
                                         FractionalOrder alpha,
                                         std::optional<std::size_t> memory_length) {
  if (signal.empty()) throw PreconditionError("gl_derivative_series needs at least one sample");
  const GLWeights w(alpha, window_end(signal.size() - 1, memory_length));
  const double scale = std::pow(step, -alpha.value());
  std::vector<double> out(signal.size());
  for (std::size_t k = 0; k < signal.size(); ++k) {
    out[k] = scale * weighted_tail(w.values().data(), signal.data(), k, 0,
                                   window_end(k, memory_length), signal.front());
  }
  return out;
}

std::vector<double> gl_step(std::span<const GLHistory> histories,
                            std::span<const double> rhs_values, const GLWeights& weights) {
  if (histories.size() != rhs_values.size()) {
    throw ConsistencyError("gl_step: " + std::to_string(histories.size()) + " histories but " +
                           std::to_string(rhs_values.size()) + " right-hand sides");
  }
  if (histories.empty()) return {};
  const double h = histories.front().step();
  const std::size_t len = histories.front().size();
  if (len == 0) throw PreconditionError("gl_step needs at least one sample per history");
  for (const auto& hist : histories) {
    if (hist.step() != h || hist.size() != len) {
      throw ConsistencyError("gl_step: histories differ in step size or length");
    }
  }
  const double h_alpha = std::pow(h, weights.order().value());
  std::vector<double> next(histories.size());
  // x[k+1] - x0 = h^a g - Σ_{j>=1} w_j (x[k+1-j] - x0); index k+1 is the new sample.
  for (std::size_t i = 0; i < histories.size(); ++i) {
    const auto& hist = histories[i];
    const double memory = hist.shifted_sum(weights, len, 1);
    next[i] = h_alpha * rhs_values[i] - memory + hist.initial();
  }
  return next;
}

std::vector<double> gl_step(std::span<const GLHistory> histories,
                            std::span<const double> rhs_values, FractionalOrder alpha) {
  const std::size_t len = histories.empty() ? 0 : histories.front().size();
  return gl_step(histories, rhs_values, GLWeights(alpha, len));
}

std::vector<std::vector<double>> integrate_fde(const FdeRhs& rhs, std::span<const double> x0,
                                               FractionalOrder alpha, double step,
                                               std::size_t steps,
                                               std::optional<std::size_t> memory_length) {
  const GLWeights w(alpha, steps + 1);
  std::vector<GLHistory> hist;
  hist.reserve(x0.size());
  for (double v : x0) {
    hist.emplace_back(step, memory_length);
    hist.back().reserve(steps + 1);
    hist.back().push(v);
  }
  std::vector<std::vector<double>> out;
  out.reserve(steps + 1);
  out.emplace_back(x0.begin(), x0.end());
  std::vector<double> g(x0.size());
  for (std::size_t k = 0; k < steps; ++k) {
    rhs(out.back(), static_cast<double>(k) * step, g);
    auto next = gl_step(hist, g, w);
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i].push(next[i]);
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace fracsmo
