#pragma once

#include <string>

#include "apc/dynamics.hpp"
#include "apc/graph.hpp"

namespace apc {

/// Empirical verdict on the two precision targets and gain boundedness.
/// sync_ok / opt_ok: the corresponding distances stay within epsilon over
/// the trailing window; gains_bounded: every gain is finite over the whole
/// run and its trailing variation stays below settle_tol. t_sync / t_opt
/// are the first entry times into the epsilon tubes that are never exited
/// afterwards (NaN when the tube is never reached for good).
struct PrecisionReport {
  bool sync_ok = false;
  bool opt_ok = false;
  bool gains_bounded = false;
  double t_sync = 0.0;
  double t_opt = 0.0;
  std::string abort_reason;

  bool all_ok() const { return sync_ok && opt_ok && gains_bounded && abort_reason.empty(); }
};

PrecisionReport check_precision_targets(const Trajectory& traj, double epsilon,
                                        double trailing_fraction = 0.1,
                                        double settle_tol = 1e-2);

/// Gain-consensus ball and exponential envelope along the run. For each
/// gain family (rate k): d_e = 8 max{v} / (min{v} (k lambda2)^2),
/// T = 2 max{v} ln(2 W(0) / (d_e min{v})) / (k lambda2), and the envelope
/// W(t) <= W(0) E(t) + (1 - E(t)) 4 max{v}/(k lambda2)^2 with
/// E(t) = exp(-k lambda2 t / (2 max{v})). ball_ok checks
/// |g(t) - 1 g_s(t)|^2 <= d_e for all samples with t >= T; envelope_ok
/// checks the W bound at every sample within envelope_slack. Trivially true
/// for single-agent runs where no consensus error exists.
struct GainBallReport {
  double d_e_gamma = 0.0;
  double d_e_alpha = 0.0;
  double t_gamma = 0.0;
  double t_alpha = 0.0;
  bool gamma_ball_ok = false;
  bool alpha_ball_ok = false;
  bool gamma_envelope_ok = false;
  bool alpha_envelope_ok = false;
  double worst_ball_margin = 0.0;      // max over samples of |dev|^2 - d_e past T
  double worst_envelope_margin = 0.0;  // max over samples of W - envelope

  bool all_ok() const {
    return gamma_ball_ok && alpha_ball_ok && gamma_envelope_ok && alpha_envelope_ok;
  }
};

GainBallReport check_gain_ball(const Trajectory& traj, const LaplacianData& lap, double k_gamma,
                          double k_alpha, double envelope_slack = 1e-6);

/// Monotonicity of the sampled weighted gain averages and the identity of
/// their derivatives. max_drop is the largest per-step decrease of gamma_s
/// or alpha_s (nonnegative when none); max_rate_gap the largest
/// |d gamma_s/dt - d alpha_s/dt| over the samples, with the derivatives
/// recomputed from the gain dynamics.
struct GainAverageReport {
  bool nondecreasing = false;
  bool rates_equal = false;
  double max_drop = 0.0;
  double max_rate_gap = 0.0;

  bool all_ok() const { return nondecreasing && rates_equal; }
};

GainAverageReport check_gain_averages(const Trajectory& traj, const ScenarioConfig& cfg,
                                      const LaplacianData& lap, double drop_slack,
                                      double rate_tol = 1e-12);

}  // namespace apc
