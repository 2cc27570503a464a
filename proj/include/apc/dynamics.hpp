#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "apc/channels.hpp"
#include "apc/corruption.hpp"
#include "apc/graph.hpp"
#include "apc/sets.hpp"

namespace apc {

/// Stacked network state: N agent blocks of dimension `dim` plus the
/// diagonal coupling (gamma) and descent (alpha) gains.
struct NetworkState {
  Eigen::VectorXd x;
  Eigen::VectorXd gamma;
  Eigen::VectorXd alpha;
  double t = 0.0;
};

enum class Integrator { euler, rk4 };

struct ScenarioConfig {
  std::string name;
  DiGraph graph;
  int dim = 0;                        // per-agent state dimension n
  std::vector<IntersectionSet> sets;  // local optimal set X_i per agent
  double epsilon = 0.0;
  double k_gamma = 0.0;
  double k_alpha = 0.0;
  CorruptionPolicy corruption;
  double dt = 0.0;
  double horizon = 0.0;
  Eigen::VectorXd x0;
  Eigen::VectorXd gamma0;
  Eigen::VectorXd alpha0;
  Integrator integrator = Integrator::euler;
  std::uint64_t seed = 0;
  bool freeze_gains = false;            // hold gains at their initial values
  bool corrupted_gain_input = false;    // feed |x_i - corrupted proj| to dsat
  double projection_tol = 1e-10;        // Dykstra tolerance inside the dynamics
};

/// Throws std::invalid_argument / std::runtime_error naming the violated
/// invariant: graph shape and no-self-arcs, strong connectivity, positive
/// epsilon/k/dt/horizon, state sizes, nonempty X_i and X_o (checked by
/// running the exact projector from every member center).
void validate_scenario(const ScenarioConfig& cfg);

/// Intersection of all agents' members (the candidate optimal set X_o).
IntersectionSet optimal_intersection(const std::vector<IntersectionSet>& sets);

/// Deadzone-saturation: 0 on [0, epsilon], a - epsilon on
/// [epsilon, epsilon + 1], then 1.
double dsat(double epsilon, double a);

/// Time-derivative of the stacked agent states,
///   dx_i = gamma_i alpha_i sum_j a_ij (x_j - x_i) - alpha_i (x_i - corrupted_proj_i(x_i)),
/// together with the audit quantities of the corrupted projections used.
struct AgentDerivative {
  Eigen::VectorXd dx;
  Eigen::VectorXd local_distance;      // exact |x_i|_{X_i}
  Eigen::VectorXd corrupted_distance;  // |x_i - corrupted proj|
  Eigen::VectorXd projection_error;    // |corrupted proj - exact proj|
  Eigen::VectorXi sweeps;
};
AgentDerivative agent_rhs(const NetworkState& state, const ScenarioConfig& cfg, ErrorRng& rng);

/// Adaptive-gain derivatives
///   dgamma_i = k_gamma sum_{j in N_i} a_ij (gamma_j - gamma_i)
///            + dsat(eps, |x_i|_{X_i})/2 + dsat(eps, sum_{j in N_i} |x_j - x_i|)/2
/// and the same with k_alpha for alpha. The dsat inputs are shared between
/// the two families, so the v-weighted averages move identically.
struct GainDerivative {
  Eigen::VectorXd dgamma;
  Eigen::VectorXd dalpha;
};
GainDerivative gain_rhs(const NetworkState& state, const ScenarioConfig& cfg,
                        const Eigen::VectorXd& local_distance);
/// Overload computing the exact set distances itself.
GainDerivative gain_rhs(const NetworkState& state, const ScenarioConfig& cfg);

/// One integrator step of the coupled (x, gamma, alpha) system. Corrupted
/// projections are drawn from `rng` once per derivative evaluation (one
/// draw sequence for euler, four for rk4), so a fixed seed gives a bitwise
/// reproducible euler run. stage1 carries the audit of the evaluation at
/// the step's start time.
struct StepResult {
  NetworkState next;
  AgentDerivative stage1;
};
StepResult step(const NetworkState& state, const ScenarioConfig& cfg, ErrorRng& rng);

struct Trajectory {
  double dt = 0.0;
  int n_agents = 0;
  int dim = 0;
  std::vector<double> times;
  Eigen::MatrixXd x;      // samples x (n_agents * dim)
  Eigen::MatrixXd gamma;  // samples x n_agents
  Eigen::MatrixXd alpha;  // samples x n_agents
  ProjectionAudit audit;
  MetricChannels channels;
  std::string abort_reason;  // empty when the run completed

  bool aborted() const { return !abort_reason.empty(); }
  int n_samples() const { return static_cast<int>(times.size()); }
};

/// Integrates the scenario over [0, horizon] and returns the trajectory
/// with all metric channels populated. ceil(horizon/dt) + 1 samples when
/// the run completes; a divergence (any state component beyond 1e9) or a
/// zeta-rule violation truncates the run and records the abort reason.
Trajectory simulate(const ScenarioConfig& cfg);

/// State-magnitude bound beyond which a run is declared divergent.
inline constexpr double kDivergenceLimit = 1e9;

}  // namespace apc
