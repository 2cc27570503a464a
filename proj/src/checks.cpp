#include "apc/checks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "apc/metrics.hpp"

namespace apc {

namespace {

// First sample index from which pred holds through the end, or -1.
template <typename Pred>
int first_stable_index(int n_samples, Pred&& pred) {
  int start = -1;
  for (int k = 0; k < n_samples; ++k) {
    if (pred(k)) {
      if (start < 0) start = k;
    } else {
      start = -1;
    }
  }
  return start;
}

}  // namespace

PrecisionReport check_precision_targets(const Trajectory& traj, double epsilon,
                                        double trailing_fraction, double settle_tol) {
  if (!traj.channels.filled) {
    throw std::invalid_argument("check_precision_targets: trajectory has no metric channels");
  }
  PrecisionReport report;
  report.abort_reason = traj.abort_reason;
  report.t_sync = std::numeric_limits<double>::quiet_NaN();
  report.t_opt = std::numeric_limits<double>::quiet_NaN();

  const int n_samples = traj.n_samples();
  if (n_samples == 0) return report;

  const int window = std::max(1, static_cast<int>(std::floor(trailing_fraction * n_samples)));
  const int tail = n_samples - window;

  const MetricChannels& ch = traj.channels;
  report.sync_ok = true;
  report.opt_ok = true;
  for (int k = tail; k < n_samples; ++k) {
    if (ch.dist_sync(k) > epsilon) report.sync_ok = false;
    if (ch.dist_local.row(k).maxCoeff() > epsilon) report.opt_ok = false;
  }

  bool finite = traj.gamma.allFinite() && traj.alpha.allFinite();
  bool settled = true;
  for (int i = 0; i < traj.n_agents && finite; ++i) {
    const auto gamma_tail = traj.gamma.col(i).segment(tail, window);
    const auto alpha_tail = traj.alpha.col(i).segment(tail, window);
    if (gamma_tail.maxCoeff() - gamma_tail.minCoeff() >= settle_tol) settled = false;
    if (alpha_tail.maxCoeff() - alpha_tail.minCoeff() >= settle_tol) settled = false;
  }
  report.gains_bounded = finite && settled;

  const int sync_idx = first_stable_index(n_samples, [&](int k) { return ch.dist_sync(k) <= epsilon; });
  if (sync_idx >= 0) report.t_sync = traj.times[sync_idx];
  const int opt_idx =
      first_stable_index(n_samples, [&](int k) { return ch.dist_local.row(k).maxCoeff() <= epsilon; });
  if (opt_idx >= 0) report.t_opt = traj.times[opt_idx];
  return report;
}

namespace {

struct FamilyVerdict {
  double d_e = 0.0;
  double t_enter = 0.0;
  bool ball_ok = false;
  bool envelope_ok = false;
  double ball_margin = -std::numeric_limits<double>::infinity();
  double envelope_margin = -std::numeric_limits<double>::infinity();
};

FamilyVerdict check_gain_family(const Trajectory& traj, const Eigen::MatrixXd& gains,
                                const Eigen::VectorXd& averages, const Eigen::VectorXd& w_series,
                                const LaplacianData& lap, double k, double envelope_slack) {
  FamilyVerdict out;
  const double v_min = lap.perron.minCoeff();
  const double v_max = lap.perron.maxCoeff();
  const double rate = k * lap.lambda2;
  out.d_e = 8.0 * v_max / (v_min * rate * rate);

  const double w0 = w_series(0);
  // Time after which the exponential term fits inside d_e/2; nonpositive
  // (containment from the start) when W(0) is already small.
  out.t_enter = (w0 <= 0.0) ? -std::numeric_limits<double>::infinity()
                            : 2.0 * v_max / rate * std::log(2.0 * w0 / (out.d_e * v_min));

  const double envelope_floor = 4.0 * v_max / (rate * rate);
  out.ball_ok = true;
  out.envelope_ok = true;
  for (int s = 0; s < traj.n_samples(); ++s) {
    const double t = traj.times[s];
    const Eigen::VectorXd dev = gains.row(s).transpose().array() - averages(s);
    if (t >= out.t_enter) {
      const double margin = dev.squaredNorm() - out.d_e;
      out.ball_margin = std::max(out.ball_margin, margin);
      if (margin > 0.0) out.ball_ok = false;
    }
    const double decay = std::exp(-rate * t / (2.0 * v_max));
    const double envelope = w0 * decay + (1.0 - decay) * envelope_floor;
    const double margin = w_series(s) - envelope - envelope_slack;
    out.envelope_margin = std::max(out.envelope_margin, w_series(s) - envelope);
    if (margin > 0.0) out.envelope_ok = false;
  }
  return out;
}

}  // namespace

GainBallReport check_gain_ball(const Trajectory& traj, const LaplacianData& lap, double k_gamma,
                               double k_alpha, double envelope_slack) {
  if (!traj.channels.filled) {
    throw std::invalid_argument("check_gain_ball: trajectory has no metric channels");
  }
  GainBallReport report;
  if (traj.n_agents < 2) {
    // no consensus error exists; the ball statement is vacuous
    report.d_e_gamma = report.d_e_alpha = std::numeric_limits<double>::infinity();
    report.gamma_ball_ok = report.alpha_ball_ok = true;
    report.gamma_envelope_ok = report.alpha_envelope_ok = true;
    return report;
  }

  const FamilyVerdict g = check_gain_family(traj, traj.gamma, traj.channels.gamma_s,
                                            traj.channels.w_gamma, lap, k_gamma, envelope_slack);
  const FamilyVerdict a = check_gain_family(traj, traj.alpha, traj.channels.alpha_s,
                                            traj.channels.w_alpha, lap, k_alpha, envelope_slack);
  report.d_e_gamma = g.d_e;
  report.d_e_alpha = a.d_e;
  report.t_gamma = g.t_enter;
  report.t_alpha = a.t_enter;
  report.gamma_ball_ok = g.ball_ok;
  report.alpha_ball_ok = a.ball_ok;
  report.gamma_envelope_ok = g.envelope_ok;
  report.alpha_envelope_ok = a.envelope_ok;
  report.worst_ball_margin = std::max(g.ball_margin, a.ball_margin);
  report.worst_envelope_margin = std::max(g.envelope_margin, a.envelope_margin);
  return report;
}

GainAverageReport check_gain_averages(const Trajectory& traj, const ScenarioConfig& cfg,
                                      const LaplacianData& lap, double drop_slack,
                                      double rate_tol) {
  if (!traj.channels.filled) {
    throw std::invalid_argument("check_gain_averages: trajectory has no metric channels");
  }
  GainAverageReport report;
  report.nondecreasing = true;
  report.rates_equal = true;

  const MetricChannels& ch = traj.channels;
  for (int k = 1; k < traj.n_samples(); ++k) {
    const double drop = std::max(ch.gamma_s(k - 1) - ch.gamma_s(k),
                                 ch.alpha_s(k - 1) - ch.alpha_s(k));
    report.max_drop = std::max(report.max_drop, drop);
    if (drop > drop_slack) report.nondecreasing = false;
  }

  NetworkState state;
  for (int k = 0; k < traj.n_samples(); ++k) {
    state.x = traj.x.row(k);
    state.gamma = traj.gamma.row(k);
    state.alpha = traj.alpha.row(k);
    state.t = traj.times[k];
    const GainDerivative rhs = gain_rhs(state, cfg);
    const double gap = std::abs(lap.perron.dot(rhs.dgamma) - lap.perron.dot(rhs.dalpha));
    report.max_rate_gap = std::max(report.max_rate_gap, gap);
    if (gap > rate_tol) report.rates_equal = false;
  }
  return report;
}

}  // namespace apc
