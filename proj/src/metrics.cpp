#include "apc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace apc {

double dist_to_sync(const Eigen::VectorXd& x, int dim) {
  if (dim <= 0 || x.size() % dim != 0) {
    throw std::invalid_argument("dist_to_sync: state size must be a multiple of dim");
  }
  const int n_agents = static_cast<int>(x.size()) / dim;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n_agents; ++i) {
    mean += x.segment(static_cast<Eigen::Index>(i) * dim, dim);
  }
  mean /= n_agents;
  double acc = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    acc += (x.segment(static_cast<Eigen::Index>(i) * dim, dim) - mean).squaredNorm();
  }
  return std::sqrt(acc);
}

double dist_local(const IntersectionSet& set_i, const Eigen::VectorXd& x_i, double tol) {
  return set_distance(set_i, x_i, tol);
}

double dist_to_optimal(const Eigen::VectorXd& x, const std::vector<IntersectionSet>& sets,
                       int dim, double tol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const double d = set_distance(sets[i], x.segment(static_cast<Eigen::Index>(i) * dim, dim), tol);
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::pair<double, double> weighted_gain_averages(const Eigen::VectorXd& gamma,
                                                 const Eigen::VectorXd& alpha,
                                                 const Eigen::VectorXd& perron) {
  if (gamma.size() != perron.size() || alpha.size() != perron.size()) {
    throw std::invalid_argument("weighted_gain_averages: size mismatch");
  }
  return {perron.dot(gamma), perron.dot(alpha)};
}

LyapunovChannels lyapunov_channels(const NetworkState& state, const LaplacianData& lap,
                                   const IntersectionSet& optimal_set, int dim, double tol) {
  const int n_agents = static_cast<int>(lap.perron.size());
  LyapunovChannels out;
  for (int i = 0; i < n_agents; ++i) {
    const auto xi = state.x.segment(static_cast<Eigen::Index>(i) * dim, dim);
    const double d_opt = set_distance(optimal_set, xi, tol);
    out.w_x += lap.perron(i) * xi.squaredNorm();
    out.z_x += lap.perron(i) * d_opt * d_opt;
    out.d_x_max = std::max(out.d_x_max, d_opt * d_opt);
  }
  const auto [gamma_s, alpha_s] = weighted_gain_averages(state.gamma, state.alpha, lap.perron);
  const Eigen::VectorXd dev_gamma = state.gamma.array() - gamma_s;
  const Eigen::VectorXd dev_alpha = state.alpha.array() - alpha_s;
  out.w_gamma = dev_gamma.dot(lap.perron.cwiseProduct(dev_gamma));
  out.w_alpha = dev_alpha.dot(lap.perron.cwiseProduct(dev_alpha));
  return out;
}

void annotate_trajectory(Trajectory& traj, const ScenarioConfig& cfg, const LaplacianData& lap) {
  const int n_samples = traj.n_samples();
  const int n_agents = traj.n_agents;
  MetricChannels& ch = traj.channels;
  ch.dist_sync.resize(n_samples);
  ch.dist_opt.resize(n_samples);
  ch.dist_local.resize(n_samples, n_agents);
  ch.gamma_s.resize(n_samples);
  ch.alpha_s.resize(n_samples);
  ch.w_x.resize(n_samples);
  ch.z_x.resize(n_samples);
  ch.w_gamma.resize(n_samples);
  ch.w_alpha.resize(n_samples);
  ch.d_x_max.resize(n_samples);

  const IntersectionSet optimal_set = optimal_intersection(cfg.sets);

  NetworkState state;
  for (int k = 0; k < n_samples; ++k) {
    state.x = traj.x.row(k);
    state.gamma = traj.gamma.row(k);
    state.alpha = traj.alpha.row(k);
    state.t = traj.times[k];

    ch.dist_sync(k) = dist_to_sync(state.x, cfg.dim);
    double acc = 0.0;
    for (int i = 0; i < n_agents; ++i) {
      const double d = dist_local(cfg.sets[i],
                                  state.x.segment(static_cast<Eigen::Index>(i) * cfg.dim, cfg.dim),
                                  cfg.projection_tol);
      ch.dist_local(k, i) = d;
      acc += d * d;
    }
    ch.dist_opt(k) = std::sqrt(acc);

    const auto [gamma_s, alpha_s] = weighted_gain_averages(state.gamma, state.alpha, lap.perron);
    ch.gamma_s(k) = gamma_s;
    ch.alpha_s(k) = alpha_s;

    const LyapunovChannels lyap = lyapunov_channels(state, lap, optimal_set, cfg.dim);
    ch.w_x(k) = lyap.w_x;
    ch.z_x(k) = lyap.z_x;
    ch.w_gamma(k) = lyap.w_gamma;
    ch.w_alpha(k) = lyap.w_alpha;
    ch.d_x_max(k) = lyap.d_x_max;
  }
  ch.filled = true;
}

}  // namespace apc
