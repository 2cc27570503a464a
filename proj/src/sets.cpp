#include "apc/sets.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace apc {

Ellipsoid::Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
  const int n = static_cast<int>(center_.size());
  if (shape_.rows() != n || shape_.cols() != n || n == 0) {
    throw std::invalid_argument("ellipsoid: shape matrix must match center dimension");
  }
  if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + shape_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("ellipsoid: shape matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (shape_ + shape_.transpose()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("ellipsoid: eigendecomposition of shape matrix failed");
  }
  evals_ = solver.eigenvalues();
  basis_ = solver.eigenvectors();
  if (evals_.minCoeff() <= 0.0) {
    throw std::invalid_argument("ellipsoid: shape matrix must be positive definite");
  }
}

Ellipsoid Ellipsoid::ball(Eigen::VectorXd center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  const int n = static_cast<int>(center.size());
  return Ellipsoid(std::move(center),
                   Eigen::MatrixXd::Identity(n, n) / (radius * radius));
}

double Ellipsoid::level(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd d = y - center_;
  return d.dot(shape_ * d);
}

bool Ellipsoid::contains(const Eigen::VectorXd& y, double slack) const {
  return level(y) <= 1.0 + slack;
}

Eigen::VectorXd Ellipsoid::bounding_halfwidths() const {
  // max_{y in E} |y_k - c_k| = sqrt((Q^-1)_kk)
  Eigen::MatrixXd inv = basis_ * evals_.cwiseInverse().asDiagonal() * basis_.transpose();
  return inv.diagonal().cwiseSqrt();
}

Eigen::VectorXd project_ellipsoid(const Ellipsoid& e, const Eigen::VectorXd& x) {
  if (x.size() != e.dim()) {
    throw std::invalid_argument("project_ellipsoid: dimension mismatch");
  }
  const Eigen::VectorXd z = e.basis().transpose() * (x - e.center());
  const Eigen::VectorXd& d = e.shape_eigenvalues();
  const Eigen::VectorXd dz2 = d.cwiseProduct(z.cwiseAbs2());
  if (dz2.sum() <= 1.0) return x;  // interior or boundary

  // phi(mu) = sum d_k z_k^2 / (1 + mu d_k)^2 - 1 is convex and decreasing
  // for mu >= 0, so Newton from the left of the root is monotone; a bracket
  // with bisection guards against overshoot.
  auto phi = [&](double mu, double& deriv) {
    double value = -1.0;
    deriv = 0.0;
    for (int k = 0; k < d.size(); ++k) {
      const double w = 1.0 + mu * d(k);
      value += dz2(k) / (w * w);
      deriv -= 2.0 * dz2(k) * d(k) / (w * w * w);
    }
    return value;
  };

  double lo = 0.0;
  double hi = 1.0;
  double deriv = 0.0;
  while (phi(hi, deriv) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) {
      throw std::runtime_error("project_ellipsoid: multiplier bracket expansion failed "
                               "(ill-conditioned shape matrix)");
    }
  }

  double mu = lo;
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    const double value = phi(mu, deriv);
    if (std::abs(value) < 1e-14) {
      converged = true;
      break;
    }
    if (value > 0.0) lo = mu; else hi = mu;
    double next = mu - value / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
    if (next == mu) {
      converged = true;
      break;
    }
    mu = next;
  }
  if (!converged) {
    throw std::runtime_error("project_ellipsoid: multiplier root-find did not converge "
                             "(ill-conditioned shape matrix)");
  }

  const Eigen::VectorXd scaled = (z.array() / (1.0 + mu * d.array())).matrix();
  return e.center() + e.basis() * scaled;
}

Eigen::VectorXd project_halfspace(const Halfspace& h, const Eigen::VectorXd& x) {
  const double nn = h.normal.squaredNorm();
  if (nn == 0.0) throw std::invalid_argument("project_halfspace: zero normal");
  const double excess = h.normal.dot(x) - h.offset;
  if (excess <= 0.0) return x;
  return x - (excess / nn) * h.normal;
}

Eigen::VectorXd project_member(const ConvexMember& m, const Eigen::VectorXd& x) {
  if (const auto* e = std::get_if<Ellipsoid>(&m)) return project_ellipsoid(*e, x);
  return project_halfspace(std::get<Halfspace>(m), x);
}

double member_distance(const ConvexMember& m, const Eigen::VectorXd& x) {
  return (x - project_member(m, x)).norm();
}

DykstraResult project_intersection_counted(const IntersectionSet& s, const Eigen::VectorXd& x,
                                           double tol, int max_sweeps) {
  if (s.members.empty()) {
    throw std::invalid_argument("project_intersection: empty member list");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("project_intersection: tol must be positive");
  }
  if (s.members.size() == 1) {
    return {project_member(s.members[0], x), 0};
  }

  const auto n_members = s.members.size();
  Eigen::VectorXd y = x;
  std::vector<Eigen::VectorXd> corrections(n_members, Eigen::VectorXd::Zero(x.size()));

  const double stop = tol / 10.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const Eigen::VectorXd y_prev = y;
    for (std::size_t m = 0; m < n_members; ++m) {
      const Eigen::VectorXd w = y + corrections[m];
      y = project_member(s.members[m], w);
      corrections[m] = w - y;
    }
    if ((y - y_prev).norm() < stop) {
      bool feasible = true;
      for (const auto& m : s.members) {
        if (member_distance(m, y) > tol) {
          feasible = false;
          break;
        }
      }
      if (feasible) return {y, sweep};
    }
  }
  throw std::runtime_error("project_intersection: sweep budget exhausted before reaching tol");
}

Eigen::VectorXd project_intersection(const IntersectionSet& s, const Eigen::VectorXd& x,
                                     double tol, int max_sweeps) {
  return project_intersection_counted(s, x, tol, max_sweeps).point;
}

void bounding_box(const IntersectionSet& s, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  bool first = true;
  for (const auto& m : s.members) {
    const auto* e = std::get_if<Ellipsoid>(&m);
    if (e == nullptr) continue;  // halfspaces are unbounded, they never tighten the box
    const Eigen::VectorXd half = e->bounding_halfwidths();
    if (first) {
      lo = e->center() - half;
      hi = e->center() + half;
      first = false;
    } else {
      lo = lo.cwiseMax(e->center() - half);
      hi = hi.cwiseMin(e->center() + half);
    }
  }
  if (first) {
    throw std::invalid_argument("bounding_box: set has no bounded member");
  }
}

Eigen::VectorXd brute_force_projection(const IntersectionSet& s, const Eigen::VectorXd& x,
                                       double grid_step) {
  Eigen::VectorXd lo, hi;
  bounding_box(s, lo, hi);
  return brute_force_projection(s, x, grid_step,
                                Eigen::Vector2d(lo(0) - grid_step, lo(1) - grid_step),
                                Eigen::Vector2d(hi(0) + grid_step, hi(1) + grid_step));
}

Eigen::VectorXd brute_force_projection(const IntersectionSet& s, const Eigen::VectorXd& x,
                                       double grid_step, const Eigen::Vector2d& lo,
                                       const Eigen::Vector2d& hi) {
  if (x.size() != 2) {
    throw std::invalid_argument("brute_force_projection: oracle supports n = 2 only");
  }
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("brute_force_projection: grid_step must be positive");
  }
  const int nx = static_cast<int>(std::floor((hi(0) - lo(0)) / grid_step)) + 1;
  const int ny = static_cast<int>(std::floor((hi(1) - lo(1)) / grid_step)) + 1;

  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_point = Eigen::Vector2d::Zero();
  Eigen::VectorXd candidate(2);
  for (int ix = 0; ix < nx; ++ix) {
    candidate(0) = lo(0) + ix * grid_step;
    for (int iy = 0; iy < ny; ++iy) {
      candidate(1) = lo(1) + iy * grid_step;
      bool feasible = true;
      for (const auto& m : s.members) {
        if (const auto* e = std::get_if<Ellipsoid>(&m)) {
          if (!e->contains(candidate)) {
            feasible = false;
            break;
          }
        } else {
          const auto& h = std::get<Halfspace>(m);
          if (h.normal.dot(candidate) > h.offset) {
            feasible = false;
            break;
          }
        }
      }
      if (!feasible) continue;
      const double dist2 = (candidate - x.head<2>()).squaredNorm();
      if (dist2 < best) {
        best = dist2;
        best_point = candidate;
      }
    }
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("brute_force_projection: no feasible grid point found "
                             "(grid too coarse or empty set)");
  }
  return best_point;
}

double set_distance(const Ellipsoid& e, const Eigen::VectorXd& x) {
  return (x - project_ellipsoid(e, x)).norm();
}

double set_distance(const IntersectionSet& s, const Eigen::VectorXd& x, double tol) {
  return (x - project_intersection(s, x, tol)).norm();
}

}  // namespace apc
