#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "apc/dynamics.hpp"
#include "apc/graph.hpp"
#include "apc/sets.hpp"

namespace apc {

/// Distance of the stacked state to the synchronization subspace
/// {x_1 = ... = x_N}: the norm of x minus its stacked blockwise mean.
double dist_to_sync(const Eigen::VectorXd& x, int dim);

/// Distance of agent block x_i to its local set.
double dist_local(const IntersectionSet& set_i, const Eigen::VectorXd& x_i, double tol = 1e-10);

/// Distance to the product set X_1 x ... x X_N: sqrt(sum_i |x_i|^2_{X_i}).
double dist_to_optimal(const Eigen::VectorXd& x, const std::vector<IntersectionSet>& sets,
                       int dim, double tol = 1e-10);

/// v-weighted gain averages (gamma_s, alpha_s) = (v . gamma, v . alpha).
std::pair<double, double> weighted_gain_averages(const Eigen::VectorXd& gamma,
                                                 const Eigen::VectorXd& alpha,
                                                 const Eigen::VectorXd& perron);

/// The five Lyapunov channels of one state: W(x) = sum v_i |x_i|^2,
/// Z(x) = sum v_i |x_i|^2_{X_o}, the two gain-consensus values
/// W(gamma), W(alpha), and d(x) = max_i |x_i|^2_{X_o}.
struct LyapunovChannels {
  double w_x = 0.0;
  double z_x = 0.0;
  double w_gamma = 0.0;
  double w_alpha = 0.0;
  double d_x_max = 0.0;
};
LyapunovChannels lyapunov_channels(const NetworkState& state, const LaplacianData& lap,
                                   const IntersectionSet& optimal_set, int dim,
                                   double tol = 1e-9);

/// Fills traj.channels from the recorded states. The X_o projections use
/// Dykstra over the concatenated member list at tolerance 1e-9.
void annotate_trajectory(Trajectory& traj, const ScenarioConfig& cfg, const LaplacianData& lap);

}  // namespace apc
