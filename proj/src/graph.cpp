#include "apc/graph.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace apc {

void validate_digraph(const DiGraph& g) {
  if (g.n_agents <= 0) {
    throw std::invalid_argument("digraph: n_agents must be positive");
  }
  if (g.weights.rows() != g.n_agents || g.weights.cols() != g.n_agents) {
    throw std::invalid_argument("digraph: weight matrix must be n_agents x n_agents");
  }
  for (int i = 0; i < g.n_agents; ++i) {
    if (g.weights(i, i) != 0.0) {
      throw std::invalid_argument("digraph: self-arc weight a_" + std::to_string(i + 1) +
                                  std::to_string(i + 1) + " must be zero (no self-arcs)");
    }
    for (int j = 0; j < g.n_agents; ++j) {
      if (!(g.weights(i, j) >= 0.0)) {
        throw std::invalid_argument("digraph: edge weights must be nonnegative");
      }
    }
  }
}

Eigen::MatrixXd build_laplacian(const DiGraph& g) {
  validate_digraph(g);
  Eigen::MatrixXd lap = -g.weights;
  lap.diagonal() = g.weights.rowwise().sum();
  return lap;
}

namespace {

// Iterative DFS collecting finish order (forward pass of Kosaraju).
void dfs_finish_order(const Eigen::MatrixXd& w, bool transpose, int start,
                      std::vector<bool>& seen, std::vector<int>& order) {
  std::vector<std::pair<int, int>> stack;
  stack.emplace_back(start, 0);
  seen[start] = true;
  const int n = static_cast<int>(w.rows());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    bool descended = false;
    for (int j = next; j < n; ++j) {
      // edge node -> j exists when a_{j,node} > 0 (or a_{node,j} in the transpose pass)
      const double a = transpose ? w(node, j) : w(j, node);
      if (a > 0.0 && !seen[j]) {
        next = j + 1;
        seen[j] = true;
        stack.emplace_back(j, 0);
        descended = true;
        break;
      }
    }
    if (!descended) {
      order.push_back(node);
      stack.pop_back();
    }
  }
}

}  // namespace

bool is_strongly_connected(const DiGraph& g) {
  validate_digraph(g);
  const int n = g.n_agents;
  if (n == 1) return true;

  std::vector<bool> seen(n, false);
  std::vector<int> order;
  dfs_finish_order(g.weights, false, 0, seen, order);
  if (static_cast<int>(order.size()) != n) return false;

  // Second pass on the reversed graph from the last finished node.
  std::fill(seen.begin(), seen.end(), false);
  std::vector<int> reach;
  dfs_finish_order(g.weights, true, order.back(), seen, reach);
  return static_cast<int>(reach.size()) == n;
}

Eigen::VectorXd left_perron_vector(const Eigen::MatrixXd& laplacian) {
  const int n = static_cast<int>(laplacian.rows());
  if (n != laplacian.cols() || n == 0) {
    throw std::invalid_argument("left_perron_vector: Laplacian must be square and nonempty");
  }
  if (n == 1) return Eigen::VectorXd::Ones(1);

  const double scale = std::max(1.0, laplacian.cwiseAbs().colwise().sum().maxCoeff());
  const double zero_tol = kSpectralZeroTol * scale;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(laplacian.transpose());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("left_perron_vector: eigen-decomposition failed");
  }

  int zero_count = 0;
  int zero_index = -1;
  for (int k = 0; k < n; ++k) {
    if (std::abs(solver.eigenvalues()(k)) <= zero_tol) {
      ++zero_count;
      zero_index = k;
    }
  }
  if (zero_count != 1) {
    throw std::runtime_error(
        "left_perron_vector: nullspace of L^T is not one-dimensional (" +
        std::to_string(zero_count) + " near-zero eigenvalues); the digraph is not strongly connected");
  }

  Eigen::VectorXcd vc = solver.eigenvectors().col(zero_index);
  // The zero eigenvalue is real, so the eigenvector is real up to a complex phase.
  int imax = 0;
  vc.cwiseAbs().maxCoeff(&imax);
  vc /= vc(imax);
  if (vc.imag().cwiseAbs().maxCoeff() > 1e-8) {
    throw std::runtime_error("left_perron_vector: nullvector of L^T is not real");
  }
  Eigen::VectorXd v = vc.real();

  const double total = v.sum();
  if (std::abs(total) <= zero_tol) {
    throw std::runtime_error("left_perron_vector: nullvector has zero mass, cannot normalize");
  }
  v /= total;

  if (v.minCoeff() <= 0.0) {
    throw std::runtime_error("left_perron_vector: normalized nullvector has nonpositive entries; "
                             "the digraph is not strongly connected");
  }
  const double residual = (v.transpose() * laplacian).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale) {
    throw std::runtime_error("left_perron_vector: residual |v^T L| = " + std::to_string(residual) +
                             " exceeds tolerance");
  }
  return v;
}

ConsensusQuadratic consensus_quadratic(const Eigen::MatrixXd& laplacian,
                                       const Eigen::VectorXd& perron) {
  const int n = static_cast<int>(laplacian.rows());
  if (n < 2) {
    throw std::invalid_argument("consensus_quadratic: requires at least two agents");
  }
  if (perron.size() != n) {
    throw std::invalid_argument("consensus_quadratic: Perron vector size mismatch");
  }
  Eigen::MatrixXd weighted = perron.asDiagonal() * laplacian;
  ConsensusQuadratic out;
  out.quadratic = weighted.transpose() + weighted;

  const double scale = std::max(1.0, out.quadratic.cwiseAbs().colwise().sum().maxCoeff());
  const double zero_tol = kSpectralZeroTol * scale;

  if ((out.quadratic * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() > zero_tol) {
    throw std::runtime_error("consensus_quadratic: Q 1 != 0; Perron vector is inconsistent with L");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.quadratic);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("consensus_quadratic: symmetric eigensolver failed");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  if (std::abs(evals(0)) > zero_tol) {
    throw std::runtime_error("consensus_quadratic: smallest eigenvalue of Q is not zero");
  }
  if (evals(1) <= zero_tol) {
    throw std::runtime_error("consensus_quadratic: lambda_2(Q) <= tolerance, degenerate graph");
  }
  out.lambda2 = evals(1);
  return out;
}

LaplacianData laplacian_data(const DiGraph& g) {
  LaplacianData data;
  data.laplacian = build_laplacian(g);
  data.perron = left_perron_vector(data.laplacian);
  if (g.n_agents >= 2) {
    ConsensusQuadratic q = consensus_quadratic(data.laplacian, data.perron);
    data.quadratic = std::move(q.quadratic);
    data.lambda2 = q.lambda2;
  } else {
    data.quadratic = Eigen::MatrixXd::Zero(1, 1);
    data.lambda2 = std::numeric_limits<double>::quiet_NaN();
  }
  return data;
}

}  // namespace apc
