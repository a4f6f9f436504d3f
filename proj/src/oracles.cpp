#include "fracsmo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracsmo/fraccalc.hpp"

namespace fracsmo::oracles {

double gl_weight_closed_form(double alpha, int j) {
  if (j == 0) return 1.0;
  const double log_mag = std::lgamma(alpha + 1.0) - std::lgamma(j + 1.0) -
                         std::lgamma(alpha - j + 1.0);
  int sign_gamma = 0;
  (void)::lgamma_r(alpha - j + 1.0, &sign_gamma);
  const double parity = (j % 2 == 0) ? 1.0 : -1.0;
  return parity * sign_gamma * std::exp(log_mag);
}

double caputo_power(double p, double alpha, double t) {
  return std::tgamma(p + 1.0) / std::tgamma(p - alpha + 1.0) * std::pow(t, p - alpha);
}

double mittag_leffler(double alpha, double z) {
  if (z == 0.0) return 1.0;
  const double log_abs = std::log(std::abs(z));
  double sum = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double term = std::exp(k * log_abs - std::lgamma(alpha * k + 1.0));
    const double signed_term = (z < 0.0 && k % 2 == 1) ? -term : term;
    sum += signed_term;
    if (k > 2 && term < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

std::vector<OracleCheck> gl_oracle_suite() {
  std::vector<OracleCheck> out;
  auto add = [&](std::string name, double error, double tol) {
    out.push_back({std::move(name), error, tol, error <= tol});
  };

  {
    const FractionalOrder a(0.7);
    const GLWeights w(a, 50);
    double worst = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double ref = gl_weight_closed_form(0.7, j);
      worst = std::max(worst, std::abs(w[j] - ref) / std::abs(ref));
    }
    add("weights: recurrence vs gamma closed form, j <= 50 (rel)", worst, 1e-10);
  }

  const double h = 1e-3;
  const std::size_t steps = 1000;
  {
    GLHistory sig(h);
    for (std::size_t k = 0; k <= steps; ++k) sig.push(std::pow(k * h, 1.5));
    const double got = gl_derivative(sig, FractionalOrder(0.7));
    const double ref = caputo_power(1.5, 0.7, 1.0);
    add("D^0.7 t^1.5 at t = 1 (rel)", std::abs(got - ref) / ref, 0.01);
  }
  {
    GLHistory sig(h);
    for (std::size_t k = 0; k <= steps; ++k) sig.push(3.25);
    add("D^0.7 of a constant (abs)", std::abs(gl_derivative(sig, FractionalOrder(0.7))), 1e-8);
  }
  {
    GLHistory sig(h);
    for (std::size_t k = 0; k <= steps; ++k) sig.push(2.0 * k * h);
    const double got = gl_derivative(sig, FractionalOrder(1.0 - 1e-9));
    add("alpha -> 1 on 2t vs backward difference (rel)", std::abs(got - 2.0) / 2.0, 1e-3);
  }

  auto relax = [](std::span<const double> x, double, std::span<double> g) { g[0] = -x[0]; };
  const std::vector<double> x0{1.0};
  auto ml_run = [&](double step) {
    const auto n = static_cast<std::size_t>(std::llround(2.0 / step));
    const auto traj = integrate_fde(relax, x0, FractionalOrder(0.7), step, n);
    double worst_rel = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = k * step;
      const double ref = mittag_leffler(0.7, -std::pow(t, 0.7));
      worst_rel = std::max(worst_rel, std::abs(traj[k][0] - ref) / std::abs(ref));
    }
    const double end_err = std::abs(traj[n][0] - mittag_leffler(0.7, -std::pow(2.0, 0.7)));
    return std::pair{worst_rel, end_err};
  };
  const auto [rel_coarse, end_coarse] = ml_run(1e-3);
  const auto [rel_fine, end_fine] = ml_run(5e-4);
  (void)rel_fine;
  add("D^0.7 x = -x vs E_0.7(-t^0.7) on [0, 2] (rel)", rel_coarse, 0.01);
  add("halving h: end error ratio e(5e-4)/e(1e-3)", end_fine / end_coarse, 0.5);

  {
    const auto traj = integrate_fde(relax, x0, FractionalOrder(1.0 - 1e-9), h, steps);
    add("alpha -> 1: D x = -x vs exp(-1) at t = 1 (rel)",
        std::abs(traj[steps][0] - std::exp(-1.0)) / std::exp(-1.0), 0.01);
  }
  return out;
}

}  // namespace fracsmo::oracles
