#include "fracsmo/observer.hpp"

#include <cmath>
#include <string>

#include "fracsmo/errors.hpp"
#include "fracsmo/plant.hpp"

namespace fracsmo {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// λ |e|^{1/2} sign(e)
double twisting(double lambda, double e) { return lambda * std::sqrt(std::abs(e)) * sgn(e); }

double gate(bool on) { return on ? 1.0 : 0.0; }

}  // namespace

void GainSet::validate(std::size_t n) const {
  if (lambda.size() != n + 1 || alpha_gain.size() != n + 1) {
    throw PreconditionError("gain lists need n + 1 = " + std::to_string(n + 1) + " entries");
  }
  for (double g : lambda)
    if (!(g >= 0.0) || !std::isfinite(g)) throw PreconditionError("lambda gains must be >= 0");
  for (double g : alpha_gain)
    if (!(g >= 0.0) || !std::isfinite(g)) throw PreconditionError("alpha gains must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw PreconditionError("epsilon must be positive");
  }
}

bool GainSet::all_positive() const {
  for (double g : lambda)
    if (!(g > 0.0)) return false;
  for (double g : alpha_gain)
    if (!(g > 0.0)) return false;
  return epsilon > 0.0;
}

ObserverState ObserverState::zero(std::size_t n) {
  ObserverState s;
  s.xhat.assign(n, 0.0);
  s.xtilde.assign(n - 1, 0.0);
  s.flags.assign(n, false);
  s.streak.assign(n, 0);
  return s;
}

std::vector<double> ObserverState::pack() const {
  const std::size_t n = dimension();
  std::vector<double> v(observer_layout::size(n));
  for (std::size_t i = 1; i <= n; ++i) v[observer_layout::xhat(i)] = xhat[i - 1];
  for (std::size_t i = 2; i <= n; ++i) v[observer_layout::xtilde(n, i)] = xtilde[i - 2];
  v[observer_layout::ftilde(n)] = ftilde;
  v[observer_layout::fhat(n)] = fhat;
  v[observer_layout::thetatilde(n)] = thetatilde;
  return v;
}

void ObserverState::unpack(std::span<const double> v) {
  const std::size_t n = dimension();
  if (v.size() != observer_layout::size(n)) {
    throw ConsistencyError("observer state expects " + std::to_string(observer_layout::size(n)) +
                           " packed values");
  }
  for (std::size_t i = 1; i <= n; ++i) xhat[i - 1] = v[observer_layout::xhat(i)];
  for (std::size_t i = 2; i <= n; ++i) xtilde[i - 2] = v[observer_layout::xtilde(n, i)];
  ftilde = v[observer_layout::ftilde(n)];
  fhat = v[observer_layout::fhat(n)];
  thetatilde = v[observer_layout::thetatilde(n)];
}

ErrorRecord compute_errors(const ObserverState& state, double y) {
  const std::size_t n = state.dimension();
  ErrorRecord r;
  r.e.resize(n);
  r.e[0] = y - state.xhat[0];
  for (std::size_t i = 2; i <= n; ++i) r.e[i - 1] = state.xtilde[i - 2] - state.xhat[i - 1];
  r.e_f = state.ftilde - state.fhat;
  return r;
}

std::vector<bool> update_flags(const ErrorRecord& errors, double epsilon) {
  std::vector<bool> flags(errors.e.size(), false);
  for (std::size_t i = 0; i < errors.e.size(); ++i) {
    if (!(std::abs(errors.e[i]) <= epsilon)) break;
    flags[i] = true;
  }
  return flags;
}

std::vector<double> observer_rhs(const ObserverState& state, double y, const Expr& f1,
                                 const Expr& f2, const GainSet& gains, double time) {
  using namespace observer_layout;
  const std::size_t n = state.dimension();
  const ErrorRecord err = compute_errors(state, y);
  const auto& E = state.flags;
  const auto& lam = gains.lambda;
  const auto& alp = gains.alpha_gain;

  std::vector<double> d(size(n), 0.0);

  // Channels 1..n-1: x̂_i driven by x̃_{i+1}, x̃_{i+1} by the sign of e_i.
  for (std::size_t i = 1; i < n; ++i) {
    const double g = i == 1 ? 1.0 : gate(E[i - 2]);
    const double e = err.e[i - 1];
    d[xhat(i)] = g * (state.xtilde[i - 1] + twisting(lam[i - 1], e));
    d[xtilde(n, i + 1)] = g * alp[i - 1] * sgn(e);
  }

  // Channel n: model injection with x̃ = (y, x̃_2, ..., x̃_n).
  {
    std::vector<double> xt(n);
    xt[0] = y;
    for (std::size_t i = 2; i <= n; ++i) xt[i - 1] = state.xtilde[i - 2];
    const double g = gate(E[n - 2]);
    const double e = err.e[n - 1];
    double model = 0.0;
    if (g != 0.0) model = f1.eval(xt, time) + f2.eval(xt, time) * state.ftilde;
    d[xhat(n)] = g * (model + twisting(lam[n - 1], e));
    d[ftilde(n)] = g * alp[n - 1] * sgn(e);
  }

  // Fault channel.
  {
    const double g = gate(E[n - 1]);
    d[fhat(n)] = g * (state.thetatilde + twisting(lam[n], err.e_f));
    d[thetatilde(n)] = g * alp[n] * sgn(err.e_f);
  }
  return d;
}

std::vector<bool> channel_enabled(const std::vector<bool>& flags) {
  using namespace observer_layout;
  const std::size_t n = flags.size();
  std::vector<bool> on(size(n), true);
  for (std::size_t i = 2; i < n; ++i) {
    on[xhat(i)] = flags[i - 2];
    on[xtilde(n, i + 1)] = flags[i - 2];
  }
  on[xhat(n)] = flags[n - 2];
  on[ftilde(n)] = flags[n - 2];
  on[fhat(n)] = flags[n - 1];
  on[thetatilde(n)] = flags[n - 1];
  return on;
}

ObserverState observer_step(const ObserverState& state, std::span<const GLHistory> histories,
                            double y, const ObserverStepInput& in) {
  const std::size_t n = state.dimension();
  if (histories.size() != observer_layout::size(n)) {
    throw ConsistencyError("observer_step: expected " +
                           std::to_string(observer_layout::size(n)) + " histories");
  }
  const std::uint32_t dwell = in.flag_dwell_steps == 0 ? 1 : in.flag_dwell_steps;

  ObserverState next = state;
  if (next.streak.size() != n) next.streak.assign(n, 0);
  const auto band = update_flags(compute_errors(state, y), in.gains.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    next.streak[i] = band[i] ? next.streak[i] + 1 : 0;
    next.flags[i] = next.streak[i] >= dwell;
  }

  const auto rhs = observer_rhs(next, y, in.f1, in.f2, in.gains, in.time);
  auto values = gl_step(histories, rhs, in.weights);
  const auto current = state.pack();
  const auto enabled = channel_enabled(next.flags);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!enabled[i]) values[i] = current[i];
    if (!std::isfinite(values[i]) || std::abs(values[i]) > kDivergenceGuard) {
      throw DivergenceError("observer diverged at t = " + std::to_string(in.time), in.time);
    }
  }
  next.unpack(values);
  return next;
}

Observer::Observer(Expr f1, Expr f2, GainSet gains, FractionalOrder alpha, double step,
                   ObserverState initial, std::uint32_t flag_dwell_steps,
                   std::optional<std::size_t> memory_length, std::size_t expected_steps)
    : f1_(std::move(f1)),
      f2_(std::move(f2)),
      gains_(std::move(gains)),
      weights_(alpha, expected_steps + 1),
      dwell_(flag_dwell_steps),
      state_(std::move(initial)) {
  const std::size_t n = state_.dimension();
  if (n < 2) throw PreconditionError("observer dimension must be at least 2");
  if (state_.xtilde.size() != n - 1) throw PreconditionError("xtilde needs n - 1 entries");
  gains_.validate(n);
  if (state_.flags.size() != n) state_.flags.assign(n, false);
  if (state_.streak.size() != n) state_.streak.assign(n, 0);
  for (double v : state_.pack()) {
    histories_.emplace_back(step, memory_length);
    histories_.back().reserve(expected_steps + 1);
    histories_.back().push(v);
  }
}

const ObserverState& Observer::step(double y, double time) {
  weights_.ensure(histories_.front().size());
  state_ = observer_step(state_, histories_, y, {f1_, f2_, gains_, weights_, dwell_, time});
  const auto values = state_.pack();
  for (std::size_t i = 0; i < values.size(); ++i) histories_[i].push(values[i]);
  return state_;
}

}  // namespace fracsmo
