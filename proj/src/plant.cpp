#include "fracsmo/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fracsmo/errors.hpp"

namespace fracsmo {

namespace {

constexpr double kBoundMargin = 1.2;
constexpr double kBoundFloor = 1e-6;

std::string describe_state(std::span<const double> x, double t) {
  std::ostringstream os;
  os.precision(17);
  os << "at t = " << t << ", x = (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double with_margin(double sup) { return std::max(kBoundMargin * sup, kBoundFloor); }

}  // namespace

PlantModel::PlantModel(std::size_t n, FractionalOrder alpha, Expr f1, Expr f2, Expr fault,
                       std::vector<double> x0)
    : n_(n),
      alpha_(alpha),
      f1_(std::move(f1)),
      f2_(std::move(f2)),
      fault_(std::move(fault)),
      x0_(std::move(x0)) {
  if (n_ < 2) throw PreconditionError("plant dimension must be at least 2");
  if (x0_.size() != n_) {
    throw PreconditionError("initial state has " + std::to_string(x0_.size()) +
                            " entries, expected " + std::to_string(n_));
  }
  if (f1_.max_state_index() > n_ || f2_.max_state_index() > n_) {
    throw PreconditionError("f1/f2 reference a state beyond x" + std::to_string(n_));
  }
  if (fault_.max_state_index() > 0) {
    throw PreconditionError("the fault signal may depend on t only");
  }
  for (double v : x0_) {
    if (!std::isfinite(v)) throw PreconditionError("initial state must be finite");
  }
}

double PlantModel::fault_at(double t) const { return fault_.eval({}, t); }

double PlantModel::rhs(std::span<const double> x, double t, std::span<double> out) const {
  for (std::size_t i = 0; i + 1 < n_; ++i) out[i] = x[i + 1];
  try {
    const double f = fault_at(t);
    out[n_ - 1] = f1_.eval(x, t) + f2_.eval(x, t) * f;
    return f;
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " " + describe_state(x, t));
  }
}

void Bounds::validate() const {
  auto check = [](double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw PreconditionError("bound " + name + " must be positive and finite");
    }
  };
  if (a.empty()) throw PreconditionError("state bounds a are empty");
  for (std::size_t i = 0; i < a.size(); ++i) check(a[i], "a" + std::to_string(i + 1));
  check(A1, "A1");
  check(A2, "A2");
  check(A3, "A3");
  check(Adot1, "Adot1");
  check(Adot2, "Adot2");
  check(Adot3, "Adot3");
}

PlantStep plant_step(const PlantModel& model, std::span<const GLHistory> histories, double time,
                     const GLWeights& weights) {
  const std::size_t n = model.dimension();
  if (histories.size() != n) {
    throw ConsistencyError("plant_step: expected " + std::to_string(n) + " histories, got " +
                           std::to_string(histories.size()));
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (histories[i].empty()) throw PreconditionError("plant_step: empty history");
    x[i] = histories[i].latest();
  }
  std::vector<double> g(n);
  PlantStep out;
  out.fault = model.rhs(x, time, g);
  out.next = gl_step(histories, g, weights);
  for (double v : out.next) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard) {
      throw DivergenceError("plant state diverged " + describe_state(out.next, time), time);
    }
  }
  return out;
}

PlantStep plant_step(const PlantModel& model, std::span<const GLHistory> histories,
                     double time) {
  const std::size_t len = histories.empty() ? 0 : histories.front().size();
  return plant_step(model, histories, time, GLWeights(model.order(), len));
}

PlantTrajectory simulate_plant(const PlantModel& model, double horizon, double step,
                               std::optional<std::size_t> memory_length) {
  if (!(step > 0.0) || !(horizon > 0.0)) {
    throw PreconditionError("simulate_plant needs positive step and horizon");
  }
  const auto steps = static_cast<std::size_t>(std::llround(horizon / step));
  const std::size_t n = model.dimension();
  const GLWeights w(model.order(), steps + 1);

  std::vector<GLHistory> hist;
  for (std::size_t i = 0; i < n; ++i) {
    hist.emplace_back(step, memory_length);
    hist.back().reserve(steps + 1);
    hist.back().push(model.initial_state()[i]);
  }

  PlantTrajectory traj;
  traj.step = step;
  traj.states.reserve(steps + 1);
  traj.states.push_back(model.initial_state());
  auto record_signals = [&](std::span<const double> x, double t) {
    traj.fault.push_back(model.fault_at(t));
    traj.f1.push_back(model.f1().eval(x, t));
    traj.f2.push_back(model.f2().eval(x, t));
  };
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * step;
    auto s = plant_step(model, hist, t, w);
    record_signals(traj.states.back(), t);
    for (std::size_t i = 0; i < n; ++i) hist[i].push(s.next[i]);
    traj.states.push_back(std::move(s.next));
  }
  record_signals(traj.states.back(), static_cast<double>(steps) * step);
  return traj;
}

Bounds estimate_bounds(const PlantModel& model, double horizon, double step,
                       std::optional<std::size_t> memory_length) {
  const auto traj = simulate_plant(model, horizon, step, memory_length);
  const std::size_t n = model.dimension();
  const FractionalOrder alpha = model.order();

  Bounds b;
  b.a.assign(n, 0.0);
  for (const auto& x : traj.states)
    for (std::size_t i = 0; i < n; ++i) b.a[i] = std::max(b.a[i], std::abs(x[i]));
  for (double& v : b.a) v = with_margin(v);

  b.A1 = with_margin(sup_abs(traj.fault));
  b.A2 = with_margin(sup_abs(traj.f1));
  b.A3 = with_margin(sup_abs(traj.f2));
  b.Adot1 = with_margin(sup_abs(gl_derivative_series(traj.fault, step, alpha, memory_length)));
  b.Adot2 = with_margin(sup_abs(gl_derivative_series(traj.f1, step, alpha, memory_length)));
  b.Adot3 = with_margin(sup_abs(gl_derivative_series(traj.f2, step, alpha, memory_length)));
  return b;
}

}  // namespace fracsmo
