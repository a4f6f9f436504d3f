#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "fracsmo/errors.hpp"
#include "fracsmo/plant.hpp"

using namespace fracsmo;

namespace {

PlantModel example_plant() {
  return PlantModel(3, FractionalOrder(0.7), Expr::parse("-0.5*x1 - sin(x2) - x3*abs(x3)"),
                    Expr::parse("1"), Expr::parse("0.5*cos(0.5*pi*t)"), {0.1, 0.1, -0.1});
}

PlantModel make(std::size_t n, const char* f1, const char* f2, const char* fault,
                std::vector<double> x0, double alpha = 0.7) {
  return PlantModel(n, FractionalOrder(alpha), Expr::parse(f1), Expr::parse(f2),
                    Expr::parse(fault), std::move(x0));
}

double sup_diff(const PlantTrajectory& a, const PlantTrajectory& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    for (std::size_t i = 0; i < a.states[k].size(); ++i)
      m = std::max(m, std::abs(a.states[k][i] - b.states[k][i]));
  return m;
}

}  // namespace

TEST_CASE("model validation") {
  CHECK_THROWS_AS(make(1, "0", "0", "0", {0.0}), PreconditionError);
  CHECK_THROWS_AS(make(3, "0", "0", "0", {0.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(make(3, "x4", "0", "0", {0.0, 0.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(make(2, "0", "0", "x1*t", {0.0, 0.0}), PreconditionError);
  CHECK_NOTHROW(make(2, "x2 + t", "x1", "sin(t)", {0.0, 0.0}));
}

TEST_CASE("zero dynamics keep the state") {
  const auto model = make(2, "0", "0", "0", {1.0, 0.0});
  const auto traj = simulate_plant(model, 1.0, 1e-3);
  REQUIRE(traj.states.size() == 1001);
  for (const auto& x : traj.states) {
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 0.0);
  }
}

TEST_CASE("first step of the numerical example") {
  const auto model = example_plant();
  std::vector<double> g(3);
  const double f = model.rhs(model.initial_state(), 0.0, g);
  CHECK(f == 0.5);
  CHECK(g[0] == 0.1);
  CHECK(g[1] == -0.1);
  // -0.5*0.1 - sin(0.1) - (-0.1)*0.1 + 0.5 by hand.
  const double expected = -0.05 - std::sin(0.1) + 0.01 + 0.5;
  CHECK(std::abs(g[2] - expected) < 1e-12);
  CHECK(g[2] == doctest::Approx(0.360167).epsilon(1e-5));

  std::vector<GLHistory> hist;
  for (double v : model.initial_state()) {
    hist.emplace_back(1e-3);
    hist.back().push(v);
  }
  const auto step = plant_step(model, hist, 0.0);
  const double ha = std::pow(1e-3, 0.7);
  CHECK(step.fault == 0.5);
  for (int i = 0; i < 3; ++i) {
    CHECK(step.next[i] == doctest::Approx(model.initial_state()[i] + ha * g[i]).epsilon(1e-14));
  }
}

TEST_CASE("a vanishing fault makes f2 irrelevant") {
  const auto with_f2 = simulate_plant(make(3, "-x1 - 0.3*x3", "2 + sin(x2)", "0", {0.2, 0, 0}), 3.0, 1e-3);
  const auto without = simulate_plant(make(3, "-x1 - 0.3*x3", "0", "0", {0.2, 0, 0}), 3.0, 1e-3);
  CHECK(sup_diff(with_f2, without) == 0.0);
}

TEST_CASE("chain property: D^a x_i reproduces x_{i+1}") {
  const double h = 1e-3;
  const auto traj = simulate_plant(example_plant(), 5.0, h);
  const FractionalOrder a(0.7);
  for (int i = 0; i < 2; ++i) {
    std::vector<double> xi, xnext;
    for (const auto& x : traj.states) {
      xi.push_back(x[i]);
      xnext.push_back(x[i + 1]);
    }
    const auto d = gl_derivative_series(xi, h, a);
    double shifted = 0.0, aligned = 0.0;
    for (std::size_t k = 1; k < xi.size(); ++k) {
      shifted = std::max(shifted, std::abs(d[k] - xnext[k - 1]));
      aligned = std::max(aligned, std::abs(d[k] - xnext[k]));
    }
    CHECK(shifted < 1e-9);  // explicit scheme: exact up to round-off
    CHECK(aligned < 0.02);  // one step of lag, O(h)
  }
}

TEST_CASE("simulation is deterministic") {
  const auto a = simulate_plant(example_plant(), 4.0, 1e-3);
  const auto b = simulate_plant(example_plant(), 4.0, 1e-3);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    CHECK(std::memcmp(a.states[k].data(), b.states[k].data(), 3 * sizeof(double)) == 0);
}

TEST_CASE("estimate_bounds") {
  SUBCASE("constant system") {
    const auto b = estimate_bounds(make(2, "0", "0", "0.5*cos(0.5*pi*t)", {0.0, 0.0}), 5.0, 1e-3);
    CHECK(b.a[0] == 1e-6);
    CHECK(b.a[1] == 1e-6);
    CHECK(b.A1 >= 0.5);
    CHECK(b.A1 <= 0.6);
    CHECK(b.A2 == 1e-6);
    CHECK(b.A3 == 1e-6);
    CHECK_NOTHROW(b.validate());
  }
  SUBCASE("numerical example bounds hold on their own trajectory") {
    const auto model = example_plant();
    const auto b = estimate_bounds(model, 30.0, 1e-3);
    CHECK_NOTHROW(b.validate());
    const auto traj = simulate_plant(model, 30.0, 1e-3);
    for (const auto& x : traj.states)
      for (int i = 0; i < 3; ++i) CHECK(std::abs(x[i]) < b.a[i]);
    for (std::size_t k = 0; k < traj.fault.size(); ++k) {
      CHECK(std::abs(traj.fault[k]) < b.A1);
      CHECK(std::abs(traj.f1[k]) < b.A2);
      CHECK(std::abs(traj.f2[k]) < b.A3);
    }
    CHECK(b.A1 == doctest::Approx(0.6));
    CHECK(b.A3 == doctest::Approx(1.2));
    // x3 swings through roughly ±0.42 once the forced response settles.
    CHECK(b.a[2] > 0.4);
    CHECK(b.a[2] < 0.7);
  }
  SUBCASE("divergence") {
    const auto model = make(2, "x2*x2*x2 + 10", "0", "0", {1.0, 1.0});
    CHECK_THROWS_AS(estimate_bounds(model, 50.0, 1e-3), DivergenceError);
  }
}

TEST_CASE("expression failures carry state and time") {
  const auto model = make(2, "sqrt(x1)", "0", "0", {-1.0, 0.0});
  std::vector<GLHistory> hist;
  for (double v : model.initial_state()) {
    hist.emplace_back(1e-3);
    hist.back().push(v);
  }
  CHECK_THROWS_WITH_AS(plant_step(model, hist, 0.25), doctest::Contains("t = 0.25"), EvalError);
}

TEST_CASE("short-memory error shrinks with the window length") {
  // Measured sup-norm changes over 30 s: 0.0151 (5 s window), 0.0067 (10 s),
  // 0.0032 (15 s). The w_j tail decays like j^-1.7, so windows shorter than
  // the horizon do not get below 1e-3 here; memory is unbounded by default.
  const auto model = example_plant();
  const auto full = simulate_plant(model, 30.0, 1e-3);
  double previous = 1.0;
  for (std::size_t window : {5000u, 10000u, 15000u}) {
    const double d = sup_diff(full, simulate_plant(model, 30.0, 1e-3, window));
    MESSAGE("window " << window << " steps: sup-norm change " << d);
    CHECK(d > 0.0);
    CHECK(d < previous);
    previous = d;
  }
  CHECK(sup_diff(full, simulate_plant(model, 30.0, 1e-3, std::size_t{5000})) < 0.02);
  CHECK(sup_diff(full, simulate_plant(model, 30.0, 1e-3, std::size_t{30000})) == 0.0);
}
