#pragma once

#include <Eigen/Dense>

namespace apc {

/// Per-sample metric and Lyapunov channels evaluated along a trajectory.
/// Filled by annotate_trajectory (metrics.hpp); every vector has one entry
/// per sample, dist_local one row per sample and one column per agent.
struct MetricChannels {
  bool filled = false;
  Eigen::VectorXd dist_sync;   // |x|_{A_s}
  Eigen::VectorXd dist_opt;    // |x|_{A_o} = sqrt(sum_i |x_i|^2_{X_i})
  Eigen::MatrixXd dist_local;  // |x_i|_{X_i}
  Eigen::VectorXd gamma_s;     // v-weighted coupling-gain average
  Eigen::VectorXd alpha_s;     // v-weighted descent-gain average
  Eigen::VectorXd w_x;         // sum_i v_i |x_i|^2
  Eigen::VectorXd z_x;         // sum_i v_i |x_i|^2_{X_o}
  Eigen::VectorXd w_gamma;     // (gamma - 1 gamma_s)^T V (gamma - 1 gamma_s)
  Eigen::VectorXd w_alpha;     // same for alpha
  Eigen::VectorXd d_x_max;     // max_i |x_i|^2_{X_o}
};

}  // namespace apc
