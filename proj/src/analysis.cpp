#include "fracsmo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracsmo/errors.hpp"

namespace fracsmo {

std::string to_string(ConditionSource s) {
  switch (s) {
    case ConditionSource::Derived: return "derived";
    case ConditionSource::Extrapolated: return "extrapolated from step-1 analysis";
    case ConditionSource::Heuristic: return "heuristic";
  }
  return "?";
}

bool GainReport::all_hold() const {
  return std::all_of(channels.begin(), channels.end(),
                     [](const ChannelCondition& c) { return c.condition_2_holds; });
}

double lambda_threshold(double alpha_gain, double disturbance_bound) {
  const double d = disturbance_bound;
  if (!(alpha_gain > d)) throw PreconditionError("lambda threshold needs alpha > D");
  return std::sqrt(4.0 * d * (alpha_gain + d) / (alpha_gain - d));
}

namespace {

ChannelCondition evaluate(std::size_t channel, ConditionSource source, std::string symbol,
                          double bound, double alpha_gain, double lambda) {
  ChannelCondition c;
  c.channel = channel;
  c.source = source;
  c.disturbance = std::move(symbol);
  c.disturbance_bound = bound;
  c.alpha_gain = alpha_gain;
  c.lambda = lambda;
  c.condition_1_margin = alpha_gain - bound;
  c.condition_1_holds = alpha_gain > bound;
  if (c.condition_1_holds) {
    c.condition_2_evaluated = true;
    c.lambda_threshold = lambda_threshold(alpha_gain, bound);
    const double rhs = 4.0 * bound * (alpha_gain + bound) / (alpha_gain - bound);
    c.condition_2_margin = lambda * lambda - rhs;
    c.condition_2_holds = lambda * lambda > rhs;
  }
  return c;
}

}  // namespace

GainReport check_gains(const GainSet& gains, const Bounds& bounds) {
  bounds.validate();
  const std::size_t n = bounds.a.size();
  if (gains.lambda.size() != n + 1 || gains.alpha_gain.size() != n + 1) {
    throw PreconditionError("gain lists must have n + 1 entries for n = " + std::to_string(n));
  }
  GainReport report;
  report.bounds = bounds;
  const auto& lam = gains.lambda;
  const auto& alp = gains.alpha_gain;

  // Channels whose perturbation is a state x_{i+2}.
  for (std::size_t i = 1; i + 2 <= n; ++i) {
    const auto source = i == 1 ? ConditionSource::Derived : ConditionSource::Extrapolated;
    report.channels.push_back(evaluate(i, source, "a" + std::to_string(i + 2), bounds.a[i + 1],
                                       alp[i - 1], lam[i - 1]));
  }
  // Channel n-1 is perturbed by D^a x_n = f1 + f2 f.
  report.channels.push_back(evaluate(n - 1, ConditionSource::Extrapolated, "A2 + A3*A1",
                                     bounds.A2 + bounds.A3 * bounds.A1, alp[n - 2], lam[n - 2]));
  // Channel n: D^a of the model injection, including f2 D^a f̃ = f2 alpha_n sign(e_n).
  const double dn = bounds.Adot2 + bounds.Adot3 * bounds.A1 + bounds.A3 * bounds.Adot1 +
                    bounds.A3 * alp[n - 1];
  report.channels.push_back(evaluate(n, ConditionSource::Extrapolated,
                                     "Adot2 + Adot3*A1 + A3*Adot1 + A3*alpha_n", dn, alp[n - 1],
                                     lam[n - 1]));
  report.channels.push_back(
      evaluate(n + 1, ConditionSource::Heuristic, "Adot1", bounds.Adot1, alp[n], lam[n]));
  return report;
}

void validate_spd(const Eigen::MatrixXd& P) {
  if (P.rows() == 0 || P.rows() != P.cols()) throw PreconditionError("P must be square");
  if (!P.allFinite()) throw PreconditionError("P must be finite");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("P must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw PreconditionError("P must be positive definite");
}

double default_lemma_tolerance(FractionalOrder alpha, double step) {
  const double a = alpha.value();
  return 10.0 * std::pow(step, std::min(a, 1.0 - a));
}

LemmaCheck verify_lemma1(std::span<const std::vector<double>> errors, const Eigen::MatrixXd& P,
                         FractionalOrder alpha, double step, std::optional<double> tolerance,
                         double t0, std::optional<std::size_t> memory_length) {
  if (errors.size() < 2) {
    throw PreconditionError("Lyapunov check needs at least 2 samples, got " +
                            std::to_string(errors.size()));
  }
  validate_spd(P);
  const auto m = static_cast<std::size_t>(P.rows());
  for (const auto& e : errors) {
    if (e.size() != m) throw PreconditionError("error vectors do not match the size of P");
  }

  LemmaCheck out;
  out.P = P;
  out.tolerance = tolerance.value_or(default_lemma_tolerance(alpha, step));
  out.samples = errors.size();

  const std::size_t len = errors.size();
  std::vector<double> energy(len);
  std::vector<std::vector<double>> comps(m, std::vector<double>(len));
  Eigen::VectorXd e(m);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      e[i] = errors[k][i];
      comps[i][k] = errors[k][i];
    }
    energy[k] = e.dot(P * e);
  }
  const auto d_energy = gl_derivative_series(energy, step, alpha, memory_length);
  std::vector<std::vector<double>> d_comps;
  d_comps.reserve(m);
  for (const auto& c : comps) d_comps.push_back(gl_derivative_series(c, step, alpha, memory_length));

  Eigen::VectorXd de(m);
  double worst = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      e[i] = comps[i][k];
      de[i] = d_comps[i][k];
    }
    const double lhs = 0.5 * d_energy[k];
    const double rhs = e.dot(P * de);
    const double gap = lhs - rhs;
    worst = std::max(worst, gap);
    if (gap > out.tolerance) out.violation_times.push_back(t0 + static_cast<double>(k) * step);
  }
  out.max_violation = worst;
  return out;
}

std::vector<std::vector<double>> error_vectors(const Trajectory& traj) {
  std::vector<std::vector<double>> out;
  out.reserve(traj.rows.size());
  for (const auto& r : traj.rows) {
    auto v = r.e;
    v.push_back(r.e_f);
    out.push_back(std::move(v));
  }
  return out;
}

const SignalMetrics& Metrics::at(const std::string& name) const {
  for (const auto& s : signals)
    if (s.name == name) return s;
  throw std::out_of_range("no metrics for signal " + name);
}

SignalMetrics signal_metrics(std::string name, std::span<const double> t,
                             std::span<const double> error, double band) {
  SignalMetrics m;
  m.name = std::move(name);
  const std::size_t len = error.size();
  if (len == 0) return m;

  std::size_t last_out = len;  // index of the last sample outside the band
  for (std::size_t k = len; k-- > 0;) {
    if (!(std::abs(error[k]) <= band)) {
      last_out = k;
      break;
    }
  }
  if (last_out == len)
    m.convergence_time = t[0];
  else if (last_out + 1 < len)
    m.convergence_time = t[last_out + 1];

  const std::size_t start = len / 2;
  double sq = 0.0;
  for (std::size_t k = start; k < len; ++k) {
    sq += error[k] * error[k];
    m.sup_error_tail = std::max(m.sup_error_tail, std::abs(error[k]));
  }
  m.rmse_tail = std::sqrt(sq / static_cast<double>(len - start));
  return m;
}

Metrics compute_metrics(const Trajectory& traj, double band) {
  Metrics out;
  out.band = band;
  std::vector<double> t;
  t.reserve(traj.rows.size());
  for (const auto& r : traj.rows) t.push_back(r.t);
  std::vector<double> err(traj.rows.size());
  for (std::size_t i = 0; i < traj.n; ++i) {
    for (std::size_t k = 0; k < traj.rows.size(); ++k) err[k] = traj.rows[k].e[i];
    out.signals.push_back(signal_metrics("e" + std::to_string(i + 1), t, err, band));
  }
  for (std::size_t k = 0; k < traj.rows.size(); ++k) err[k] = traj.rows[k].f - traj.rows[k].fhat;
  out.signals.push_back(signal_metrics("e_fault", t, err, band));
  return out;
}

}  // namespace fracsmo
