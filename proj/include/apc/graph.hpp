#pragma once

#include <Eigen/Dense>

namespace apc {

/// Weighted digraph without self-arcs. weights(i, j) is the weight a_ij of
/// the edge j -> i; j is an in-neighbor of i when a_ij > 0.
struct DiGraph {
  int n_agents = 0;
  Eigen::MatrixXd weights;
};

/// Spectral data of a strongly connected digraph: Laplacian L, left Perron
/// vector v (v^T L = 0, v^T 1 = 1, v > 0), the symmetrized quadratic
/// Q = L^T diag{v} + diag{v} L and its second-smallest eigenvalue.
/// For the degenerate single-node graph lambda2 is NaN.
struct LaplacianData {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd perron;
  Eigen::MatrixXd quadratic;
  double lambda2 = 0.0;
};

/// Throws std::invalid_argument when the weight matrix has the wrong shape,
/// a negative entry, or a nonzero diagonal entry.
void validate_digraph(const DiGraph& g);

/// L = D - A with D = diag{row sums of A}. Rows of L sum to zero.
Eigen::MatrixXd build_laplacian(const DiGraph& g);

/// True iff every ordered node pair is connected by a directed path of
/// positive-weight edges. Kosaraju two-pass DFS; single-node graphs count
/// as strongly connected.
bool is_strongly_connected(const DiGraph& g);

/// Left Perron vector of a strongly connected digraph's Laplacian:
/// the normalized positive nullvector of L^T. Computed from the
/// eigen-decomposition of L^T (smallest-magnitude eigenvalue), sign-fixed
/// and scaled so v^T 1 = 1. Throws std::runtime_error when the nullspace
/// of L^T is not one-dimensional or the vector fails v^T L = 0 / v > 0.
Eigen::VectorXd left_perron_vector(const Eigen::MatrixXd& laplacian);

struct ConsensusQuadratic {
  Eigen::MatrixXd quadratic;
  double lambda2 = 0.0;
};

/// Q = L^T diag{v} + diag{v} L. Requires N >= 2. Verifies Q 1 = 0,
/// |lambda_1| below tolerance and lambda_2 above it; throws
/// std::runtime_error otherwise (degenerate graph).
ConsensusQuadratic consensus_quadratic(const Eigen::MatrixXd& laplacian,
                                       const Eigen::VectorXd& perron);

/// Convenience bundle: Laplacian, Perron vector and consensus quadratic of
/// a validated strongly connected digraph.
LaplacianData laplacian_data(const DiGraph& g);

/// Zero-eigenvalue tolerance, relative to the matrix 1-norm.
inline constexpr double kSpectralZeroTol = 1e-10;

}  // namespace apc
