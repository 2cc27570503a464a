#include "apc/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "apc/metrics.hpp"

namespace apc {

void validate_scenario(const ScenarioConfig& cfg) {
  validate_digraph(cfg.graph);
  if (!is_strongly_connected(cfg.graph)) {
    throw std::runtime_error("scenario: graph not strongly connected");
  }
  const int n_agents = cfg.graph.n_agents;
  if (cfg.dim <= 0) throw std::invalid_argument("scenario: dim must be positive");
  if (static_cast<int>(cfg.sets.size()) != n_agents) {
    throw std::invalid_argument("scenario: one local set per agent required");
  }
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("scenario: epsilon must be positive");
  if (!(cfg.k_gamma > 0.0)) throw std::invalid_argument("scenario: k_gamma must be positive");
  if (!(cfg.k_alpha > 0.0)) throw std::invalid_argument("scenario: k_alpha must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (!(cfg.horizon >= 0.0)) throw std::invalid_argument("scenario: horizon must be nonnegative");
  if (!(cfg.projection_tol > 0.0)) {
    throw std::invalid_argument("scenario: projection_tol must be positive");
  }
  if (cfg.x0.size() != static_cast<Eigen::Index>(n_agents) * cfg.dim) {
    throw std::invalid_argument("scenario: x0 must have n_agents * dim entries");
  }
  if (cfg.gamma0.size() != n_agents || cfg.alpha0.size() != n_agents) {
    throw std::invalid_argument("scenario: gamma0 and alpha0 must have one entry per agent");
  }
  validate_policy(cfg.corruption, n_agents);

  for (int i = 0; i < n_agents; ++i) {
    if (cfg.sets[i].members.empty()) {
      throw std::invalid_argument("scenario: local set of agent " + std::to_string(i + 1) +
                                  " has no members");
    }
    for (const auto& m : cfg.sets[i].members) {
      const Eigen::Index d =
          std::holds_alternative<Ellipsoid>(m)
              ? std::get<Ellipsoid>(m).center().size()
              : std::get<Halfspace>(m).normal.size();
      if (d != cfg.dim) {
        throw std::invalid_argument("scenario: set member dimension mismatch for agent " +
                                    std::to_string(i + 1));
      }
    }
  }

  // Nonemptiness: the exact projector must reach a feasible point of every
  // X_i and of X_o starting from each member center.
  auto check_nonempty = [](const IntersectionSet& s, const std::string& label) {
    for (const auto& m : s.members) {
      const Eigen::VectorXd start = std::holds_alternative<Ellipsoid>(m)
                                        ? std::get<Ellipsoid>(m).center()
                                        : Eigen::VectorXd::Zero(
                                              std::get<Halfspace>(m).normal.size());
      Eigen::VectorXd feasible;
      try {
        feasible = project_intersection(s, start, 1e-8);
      } catch (const std::exception& err) {
        throw std::runtime_error("scenario: " + label +
                                 " nonemptiness check failed: " + err.what());
      }
      for (const auto& member : s.members) {
        if (member_distance(member, feasible) > 1e-6) {
          throw std::runtime_error("scenario: " + label + " appears empty (projector from a "
                                   "member center did not reach a feasible point)");
        }
      }
    }
  };
  for (int i = 0; i < n_agents; ++i) {
    check_nonempty(cfg.sets[i], "X_" + std::to_string(i + 1));
  }
  check_nonempty(optimal_intersection(cfg.sets), "X_o");
}

IntersectionSet optimal_intersection(const std::vector<IntersectionSet>& sets) {
  IntersectionSet all;
  for (const auto& s : sets) {
    all.members.insert(all.members.end(), s.members.begin(), s.members.end());
  }
  return all;
}

double dsat(double epsilon, double a) {
  return 0.5 * (1.0 + std::abs(a - epsilon) - std::abs(a - epsilon - 1.0));
}

AgentDerivative agent_rhs(const NetworkState& state, const ScenarioConfig& cfg, ErrorRng& rng) {
  const int n_agents = cfg.graph.n_agents;
  const int dim = cfg.dim;
  AgentDerivative out;
  out.dx.resize(state.x.size());
  out.local_distance.resize(n_agents);
  out.corrupted_distance.resize(n_agents);
  out.projection_error.resize(n_agents);
  out.sweeps = Eigen::VectorXi::Zero(n_agents);

  for (int i = 0; i < n_agents; ++i) {
    const auto xi = state.x.segment(static_cast<Eigen::Index>(i) * dim, dim);
    Eigen::VectorXd coupling = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < n_agents; ++j) {
      const double a = cfg.graph.weights(i, j);
      if (a > 0.0) {
        coupling += a * (state.x.segment(static_cast<Eigen::Index>(j) * dim, dim) - xi);
      }
    }
    const CorruptionResult proj = corrupted_project(cfg.sets[i], xi, cfg.corruption,
                                                    state.alpha(i), i, rng, cfg.projection_tol);
    out.local_distance(i) = (xi - proj.exact).norm();
    out.corrupted_distance(i) = (xi - proj.corrupted).norm();
    out.projection_error(i) = (proj.corrupted - proj.exact).norm();
    out.sweeps(i) = proj.sweeps;

    out.dx.segment(static_cast<Eigen::Index>(i) * dim, dim) =
        state.gamma(i) * state.alpha(i) * coupling - state.alpha(i) * (xi - proj.corrupted);
  }
  return out;
}

GainDerivative gain_rhs(const NetworkState& state, const ScenarioConfig& cfg,
                        const Eigen::VectorXd& local_distance) {
  const int n_agents = cfg.graph.n_agents;
  const int dim = cfg.dim;
  GainDerivative out;
  out.dgamma.resize(n_agents);
  out.dalpha.resize(n_agents);

  for (int i = 0; i < n_agents; ++i) {
    double gamma_consensus = 0.0;
    double alpha_consensus = 0.0;
    double neighbor_gap = 0.0;  // sum over in-neighbors of |x_j - x_i|, unweighted
    const auto xi = state.x.segment(static_cast<Eigen::Index>(i) * dim, dim);
    for (int j = 0; j < n_agents; ++j) {
      const double a = cfg.graph.weights(i, j);
      if (a > 0.0) {
        gamma_consensus += a * (state.gamma(j) - state.gamma(i));
        alpha_consensus += a * (state.alpha(j) - state.alpha(i));
        neighbor_gap += (state.x.segment(static_cast<Eigen::Index>(j) * dim, dim) - xi).norm();
      }
    }
    const double adaptation = 0.5 * dsat(cfg.epsilon, local_distance(i)) +
                              0.5 * dsat(cfg.epsilon, neighbor_gap);
    out.dgamma(i) = cfg.k_gamma * gamma_consensus + adaptation;
    out.dalpha(i) = cfg.k_alpha * alpha_consensus + adaptation;
  }
  return out;
}

GainDerivative gain_rhs(const NetworkState& state, const ScenarioConfig& cfg) {
  const int n_agents = cfg.graph.n_agents;
  Eigen::VectorXd dist(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    dist(i) = set_distance(cfg.sets[i],
                           state.x.segment(static_cast<Eigen::Index>(i) * cfg.dim, cfg.dim),
                           cfg.projection_tol);
  }
  return gain_rhs(state, cfg, dist);
}

namespace {

struct FullDerivative {
  Eigen::VectorXd dx;
  Eigen::VectorXd dgamma;
  Eigen::VectorXd dalpha;
};

FullDerivative evaluate(const NetworkState& state, const ScenarioConfig& cfg, ErrorRng& rng,
                        AgentDerivative* audit_out) {
  AgentDerivative agents = agent_rhs(state, cfg, rng);
  FullDerivative out;
  if (cfg.freeze_gains) {
    out.dgamma = Eigen::VectorXd::Zero(state.gamma.size());
    out.dalpha = Eigen::VectorXd::Zero(state.alpha.size());
  } else {
    const Eigen::VectorXd& dsat_input =
        cfg.corrupted_gain_input ? agents.corrupted_distance : agents.local_distance;
    GainDerivative gains = gain_rhs(state, cfg, dsat_input);
    out.dgamma = std::move(gains.dgamma);
    out.dalpha = std::move(gains.dalpha);
  }
  out.dx = std::move(agents.dx);
  if (audit_out != nullptr) {
    agents.dx.resize(0);
    *audit_out = std::move(agents);
  }
  return out;
}

NetworkState advance(const NetworkState& s, const FullDerivative& d, double h) {
  NetworkState out;
  out.x = s.x + h * d.dx;
  out.gamma = s.gamma + h * d.dgamma;
  out.alpha = s.alpha + h * d.dalpha;
  out.t = s.t + h;
  return out;
}

}  // namespace

StepResult step(const NetworkState& state, const ScenarioConfig& cfg, ErrorRng& rng) {
  StepResult out;
  const double h = cfg.dt;
  FullDerivative k1 = evaluate(state, cfg, rng, &out.stage1);
  if (cfg.integrator == Integrator::euler) {
    out.next = advance(state, k1, h);
    return out;
  }
  // classical RK4
  FullDerivative k2 = evaluate(advance(state, k1, 0.5 * h), cfg, rng, nullptr);
  FullDerivative k3 = evaluate(advance(state, k2, 0.5 * h), cfg, rng, nullptr);
  FullDerivative k4 = evaluate(advance(state, k3, h), cfg, rng, nullptr);
  FullDerivative blended;
  blended.dx = (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx) / 6.0;
  blended.dgamma = (k1.dgamma + 2.0 * k2.dgamma + 2.0 * k3.dgamma + k4.dgamma) / 6.0;
  blended.dalpha = (k1.dalpha + 2.0 * k2.dalpha + 2.0 * k3.dalpha + k4.dalpha) / 6.0;
  out.next = advance(state, blended, h);
  return out;
}

namespace {

bool state_ok(const NetworkState& s) {
  auto finite_and_bounded = [](const Eigen::VectorXd& v) {
    return v.allFinite() && v.cwiseAbs().maxCoeff() <= kDivergenceLimit;
  };
  return finite_and_bounded(s.x) && finite_and_bounded(s.gamma) && finite_and_bounded(s.alpha);
}

}  // namespace

Trajectory simulate(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  const LaplacianData lap = laplacian_data(cfg.graph);

  const int n_agents = cfg.graph.n_agents;
  const int n_steps = static_cast<int>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
  const int n_samples = std::max(n_steps, 0) + 1;

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.n_agents = n_agents;
  traj.dim = cfg.dim;
  traj.times.reserve(n_samples);
  traj.x.resize(n_samples, cfg.x0.size());
  traj.gamma.resize(n_samples, n_agents);
  traj.alpha.resize(n_samples, n_agents);
  traj.audit.enabled = true;
  traj.audit.error.resize(n_samples, n_agents);
  traj.audit.sweeps.setZero(n_samples, n_agents);

  NetworkState state{cfg.x0, cfg.gamma0, cfg.alpha0, 0.0};
  int recorded = 0;
  auto record = [&](const NetworkState& s) {
    traj.times.push_back(s.t);
    traj.x.row(recorded) = s.x;
    traj.gamma.row(recorded) = s.gamma;
    traj.alpha.row(recorded) = s.alpha;
    ++recorded;
  };

  if (!state_ok(state)) {
    traj.abort_reason = "divergence: initial state exceeds bounds";
  } else {
    record(state);
    for (int k = 0; k < n_steps; ++k) {
      ErrorRng rng = ErrorRng::substream(cfg.seed, static_cast<std::uint64_t>(k));
      StepResult result;
      try {
        result = step(state, cfg, rng);
      } catch (const ZetaRuleViolation& err) {
        traj.abort_reason = std::string("zeta rule violation at t = ") +
                            std::to_string(state.t) + ": " + err.what();
        break;
      }
      traj.audit.error.row(recorded - 1) = result.stage1.projection_error;
      traj.audit.sweeps.row(recorded - 1) = result.stage1.sweeps;
      if (!state_ok(result.next)) {
        traj.abort_reason = "divergence: state magnitude exceeded " +
                            std::to_string(kDivergenceLimit) + " after t = " +
                            std::to_string(state.t);
        break;
      }
      state = result.next;
      state.t = (k + 1) * cfg.dt;  // exact uniform grid, no drift
      record(state);
    }
  }

  // Audit entry for the final recorded sample (no step consumes it).
  if (recorded > 0 && traj.abort_reason.empty()) {
    ErrorRng rng = ErrorRng::substream(cfg.seed, static_cast<std::uint64_t>(n_steps));
    try {
      AgentDerivative final_eval = agent_rhs(state, cfg, rng);
      traj.audit.error.row(recorded - 1) = final_eval.projection_error;
      traj.audit.sweeps.row(recorded - 1) = final_eval.sweeps;
    } catch (const ZetaRuleViolation& err) {
      traj.abort_reason = std::string("zeta rule violation at t = ") +
                          std::to_string(state.t) + ": " + err.what();
    }
  }

  traj.times.resize(recorded);
  traj.x.conservativeResize(recorded, Eigen::NoChange);
  traj.gamma.conservativeResize(recorded, Eigen::NoChange);
  traj.alpha.conservativeResize(recorded, Eigen::NoChange);
  traj.audit.error.conservativeResize(recorded, Eigen::NoChange);
  traj.audit.sweeps.conservativeResize(recorded, Eigen::NoChange);

  annotate_trajectory(traj, cfg, lap);
  return traj;
}

}  // namespace apc
