// Test-only oracles and generators, independent of the library's
// implementation paths: reachability by transitive closure, random strongly
// connected digraphs with rational weights, random ellipsoid factories.
#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "apc/graph.hpp"
#include "apc/sets.hpp"

namespace oracles {

/// Brute-force strong connectivity: Floyd-Warshall transitive closure over
/// the positive-weight edges (edge j -> i when weights(i, j) > 0).
inline bool strongly_connected_closure(const apc::DiGraph& g) {
  const int n = g.n_agents;
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < n; ++j) {
      if (g.weights(i, j) > 0.0) reach[j][i] = true;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!reach[i][j]) return false;
    }
  }
  return true;
}

/// Random strongly connected digraph on n nodes: a directed Hamiltonian
/// cycle through a random permutation plus extra random edges, all with
/// rational weights p/q, p,q in {1..4}.
inline apc::DiGraph random_strongly_connected(int n, std::mt19937_64& rng,
                                              double extra_edge_prob = 0.3) {
  std::uniform_int_distribution<int> small(1, 4);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto weight = [&]() { return static_cast<double>(small(rng)) / small(rng); };

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  apc::DiGraph g;
  g.n_agents = n;
  g.weights.setZero(n, n);
  for (int k = 0; k < n; ++k) {
    const int from = order[k];
    const int to = order[(k + 1) % n];
    g.weights(to, from) = weight();  // edge from -> to
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && g.weights(i, j) == 0.0 && coin(rng) < extra_edge_prob) {
        g.weights(i, j) = weight();
      }
    }
  }
  return g;
}

/// Random 2-D ellipsoid with eigenvalues in [0.2, 3] and center within
/// `center_range` of the origin.
inline apc::Ellipsoid random_ellipsoid(std::mt19937_64& rng, double center_range = 1.0) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979324);
  std::uniform_real_distribution<double> eig(0.2, 3.0);
  std::uniform_real_distribution<double> pos(-center_range, center_range);
  const double theta = angle(rng);
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::Matrix2d diag = Eigen::Vector2d(eig(rng), eig(rng)).asDiagonal();
  Eigen::Matrix2d shape = rot * diag * rot.transpose();
  return apc::Ellipsoid(Eigen::Vector2d(pos(rng), pos(rng)), shape);
}

/// Random intersection of 2..3 ellipsoids that all contain `anchor`, so the
/// intersection is guaranteed nonempty.
inline apc::IntersectionSet random_intersection(std::mt19937_64& rng,
                                                const Eigen::Vector2d& anchor) {
  std::uniform_int_distribution<int> count(2, 3);
  apc::IntersectionSet set;
  const int members = count(rng);
  while (static_cast<int>(set.members.size()) < members) {
    apc::Ellipsoid e = random_ellipsoid(rng, 1.0);
    if (e.contains(anchor, -0.05)) set.members.push_back(std::move(e));
  }
  return set;
}

inline Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double range) {
  std::uniform_real_distribution<double> pos(-range, range);
  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x(k) = pos(rng);
  return x;
}

}  // namespace oracles
