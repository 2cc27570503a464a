#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace apc {

/// Solid ellipsoid {y : (y - center)^T shape (y - center) <= 1} with a
/// symmetric positive-definite shape matrix. The eigendecomposition of the
/// shape matrix is cached at construction; projections run in that basis.
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape);

  /// Ball of radius r: shape = I / r^2.
  static Ellipsoid ball(Eigen::VectorXd center, double radius);

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& shape_eigenvalues() const { return evals_; }
  int dim() const { return static_cast<int>(center_.size()); }

  /// Quadratic form (y - c)^T Q (y - c).
  double level(const Eigen::VectorXd& y) const;
  bool contains(const Eigen::VectorXd& y, double slack = 0.0) const;

  /// Axis-aligned bounding half-widths: sqrt(diag(Q^-1)).
  Eigen::VectorXd bounding_halfwidths() const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  Eigen::MatrixXd basis_;   // columns = eigenvectors of shape_
  Eigen::VectorXd evals_;   // ascending, all > 0
};

/// Halfspace {y : normal^T y <= offset}; used as a test member kind.
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

using ConvexMember = std::variant<Ellipsoid, Halfspace>;

/// Finite intersection of convex members; must be nonempty (checked at
/// scenario load, see validate_nonempty in dynamics.cpp / scenario.cpp).
struct IntersectionSet {
  std::vector<ConvexMember> members;
};

/// Exact Euclidean projection onto an ellipsoid. Interior/boundary points
/// are returned unchanged; otherwise the Lagrange-multiplier equation
/// phi(mu) = sum_k d_k z_k^2 / (1 + mu d_k)^2 - 1 = 0 is solved by Newton
/// with a bisection safeguard in the cached eigenbasis. Throws
/// std::runtime_error when the root-find does not converge.
Eigen::VectorXd project_ellipsoid(const Ellipsoid& e, const Eigen::VectorXd& x);

Eigen::VectorXd project_halfspace(const Halfspace& h, const Eigen::VectorXd& x);

Eigen::VectorXd project_member(const ConvexMember& m, const Eigen::VectorXd& x);

/// Euclidean distance from x to one member (0 inside).
double member_distance(const ConvexMember& m, const Eigen::VectorXd& x);

/// Dykstra's algorithm onto the intersection of the members. Converges to
/// the true projection; stops when the per-sweep displacement drops below
/// tol/10 and every member is satisfied within tol. Throws
/// std::runtime_error when the sweep budget is exhausted first.
Eigen::VectorXd project_intersection(const IntersectionSet& s, const Eigen::VectorXd& x,
                                     double tol, int max_sweeps = 200000);

/// Same iteration with an explicit sweep counter (used by the truncated
/// corrupted-projection mode).
struct DykstraResult {
  Eigen::VectorXd point;
  int sweeps = 0;
};
DykstraResult project_intersection_counted(const IntersectionSet& s, const Eigen::VectorXd& x,
                                           double tol, int max_sweeps = 200000);

/// Independent 2-D test oracle: exhaustive scan of a grid over box
/// [lo, hi], returning the feasible grid point closest to x. When no box is
/// given it is derived from the member bounds, padded by one grid step.
/// Throws std::runtime_error when no feasible grid point exists.
Eigen::VectorXd brute_force_projection(const IntersectionSet& s, const Eigen::VectorXd& x,
                                       double grid_step);
Eigen::VectorXd brute_force_projection(const IntersectionSet& s, const Eigen::VectorXd& x,
                                       double grid_step, const Eigen::Vector2d& lo,
                                       const Eigen::Vector2d& hi);

double set_distance(const Ellipsoid& e, const Eigen::VectorXd& x);
double set_distance(const IntersectionSet& s, const Eigen::VectorXd& x, double tol = 1e-10);

/// Axis-aligned box guaranteed to contain the intersection (intersection of
/// the member boxes; halfspace members do not tighten it).
void bounding_box(const IntersectionSet& s, Eigen::VectorXd& lo, Eigen::VectorXd& hi);

}  // namespace apc
