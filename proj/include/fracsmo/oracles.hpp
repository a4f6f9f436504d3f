#pragma once

// Closed-form references for the GL machinery. Nothing here calls into the
// GL implementation except gl_oracle_suite(), which compares the two.

#include <string>
#include <vector>

namespace fracsmo::oracles {

/// (-1)^j Γ(α+1) / (Γ(j+1) Γ(α-j+1)), evaluated through log-gamma.
double gl_weight_closed_form(double alpha, int j);

/// Caputo derivative of t^p: Γ(p+1)/Γ(p-α+1) · t^(p-α).
double caputo_power(double p, double alpha, double t);

/// One-parameter Mittag-Leffler function E_α(z) by its power series, for
/// moderate |z| (the series is summed until terms fall below 1e-17 relative).
double mittag_leffler(double alpha, double z);

struct OracleCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Runs the analytic-oracle suite for the GL derivative and solver.
std::vector<OracleCheck> gl_oracle_suite();

}  // namespace fracsmo::oracles
