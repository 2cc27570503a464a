#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apc/corruption.hpp"
#include "apc/sets.hpp"
#include "oracles.hpp"

using namespace apc;

namespace {

IntersectionSet disk_set() {
  IntersectionSet s;
  s.members.push_back(Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0));
  return s;
}

IntersectionSet lens_set() {
  IntersectionSet s;
  s.members.push_back(Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0));
  s.members.push_back(Ellipsoid::ball(Eigen::Vector2d(1.0, 0.0), 1.0));
  return s;
}

}  // namespace

TEST_CASE("exact mode returns the exact projection") {
  CorruptionPolicy policy;  // exact by default
  ErrorRng rng(7);
  const auto result =
      corrupted_project(disk_set(), Eigen::Vector2d(2, 0), policy, 1.0, 0, rng);
  CHECK((result.corrupted - result.exact).norm() == 0.0);
  CHECK((result.exact - Eigen::Vector2d(1, 0)).norm() < 1e-12);
}

TEST_CASE("synthetic mode with a fixed unit direction adds zeta * p_bar * e1") {
  CorruptionPolicy policy;
  policy.mode = ProjectionMode::synthetic;
  policy.p_bar = 1.0;
  policy.direction = ErrorDirection::fixed_unit;
  policy.fixed_zeta = Eigen::VectorXd::Constant(1, 0.1);
  ErrorRng rng(7);
  const auto result =
      corrupted_project(disk_set(), Eigen::Vector2d(2, 0), policy, 1.0, 0, rng);
  CHECK((result.corrupted - (result.exact + Eigen::Vector2d(0.1, 0))).norm() < 1e-15);
}

TEST_CASE("synthetic corruption obeys the triangle bound for every direction source") {
  std::mt19937_64 gen(31);
  for (const auto direction : {ErrorDirection::fixed_unit, ErrorDirection::seeded_random_unit,
                               ErrorDirection::adversarial_outward}) {
    CorruptionPolicy policy;
    policy.mode = ProjectionMode::synthetic;
    policy.p_bar = 0.25;
    policy.direction = direction;
    for (int k = 0; k < 100; ++k) {
      ErrorRng rng = ErrorRng::substream(9, k);
      const Eigen::VectorXd x = oracles::random_point(gen, 2, 4.0);
      const double alpha = 0.5 + (k % 5);
      const auto result = corrupted_project(lens_set(), x, policy, alpha, 0, rng);
      CHECK((result.corrupted - result.exact).norm() <= result.zeta * policy.p_bar + 1e-12);
    }
  }
}

TEST_CASE("adversarial direction points outward and vanishes on the set") {
  CorruptionPolicy policy;
  policy.mode = ProjectionMode::synthetic;
  policy.p_bar = 0.5;
  policy.direction = ErrorDirection::adversarial_outward;
  ErrorRng rng(7);

  const Eigen::VectorXd x(Eigen::Vector2d(3, 0));
  const auto outside = corrupted_project(disk_set(), x, policy, 1.0, 0, rng);
  const Eigen::VectorXd gap = x - outside.exact;
  const Eigen::VectorXd err = outside.corrupted - outside.exact;
  CHECK(err.dot(gap) > 0.0);
  CHECK(std::abs(err.norm() - outside.zeta * policy.p_bar) < 1e-12);

  const auto inside = corrupted_project(disk_set(), Eigen::Vector2d(0.2, 0.2), policy, 1.0, 0, rng);
  CHECK((inside.corrupted - inside.exact).norm() == 0.0);
}

TEST_CASE("zeta resolution follows the rule alpha * zeta <= C") {
  CorruptionPolicy policy;
  policy.mode = ProjectionMode::synthetic;
  policy.zeta_alpha_cap = 1.0;
  CHECK(resolve_zeta(policy, 4.0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(resolve_zeta(policy, 0.5, 0) == doctest::Approx(kZetaMax).epsilon(1e-15));
  CHECK(resolve_zeta(policy, -2.0, 0) == doctest::Approx(kZetaMax).epsilon(1e-15));

  policy.zeta_alpha_cap = 300.0;
  CHECK(resolve_zeta(policy, 2.0, 0) == doctest::Approx(kZetaMax).epsilon(1e-15));
  CHECK(resolve_zeta(policy, 400.0, 0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("a fixed zeta violating the rule is refused") {
  CorruptionPolicy policy;
  policy.mode = ProjectionMode::synthetic;
  policy.p_bar = 0.1;
  policy.zeta_alpha_cap = 1.0;
  policy.fixed_zeta = Eigen::VectorXd::Constant(1, 0.5);
  ErrorRng rng(7);
  CHECK_THROWS_AS(
      corrupted_project(disk_set(), Eigen::Vector2d(2, 0), policy, 3.0, 0, rng),
      ZetaRuleViolation);
  // alpha * zeta = 0.5 <= 1 passes
  CHECK_NOTHROW(corrupted_project(disk_set(), Eigen::Vector2d(2, 0), policy, 1.0, 0, rng));
}

TEST_CASE("policy validation") {
  CorruptionPolicy policy;
  policy.mode = ProjectionMode::synthetic;
  policy.p_bar = -1.0;
  CHECK_THROWS_AS(validate_policy(policy, 2), std::invalid_argument);
  policy.p_bar = 0.1;
  policy.zeta_alpha_cap = 0.0;
  CHECK_THROWS_AS(validate_policy(policy, 2), std::invalid_argument);
  policy.zeta_alpha_cap = 1.0;
  policy.fixed_zeta = Eigen::VectorXd::Constant(2, 1.5);
  CHECK_THROWS_AS(validate_policy(policy, 2), std::invalid_argument);
  policy.fixed_zeta = Eigen::VectorXd::Constant(3, 0.5);
  CHECK_THROWS_AS(validate_policy(policy, 2), std::invalid_argument);
  policy.fixed_zeta = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_NOTHROW(validate_policy(policy, 2));
}

TEST_CASE("iterative mode meets its error budget and logs the sweep cost") {
  CorruptionPolicy policy;
  policy.mode = ProjectionMode::iterative;
  policy.p_bar = 0.5;
  ErrorRng rng(7);
  const Eigen::VectorXd x(Eigen::Vector2d(0.5, 3.0));

  policy.fixed_zeta = Eigen::VectorXd::Constant(1, 0.5);
  const auto coarse = corrupted_project(lens_set(), x, policy, 0.5, 0, rng);
  CHECK((coarse.corrupted - coarse.exact).norm() <= coarse.zeta * policy.p_bar + 1e-12);

  policy.fixed_zeta = Eigen::VectorXd::Constant(1, 0.001);
  const auto fine = corrupted_project(lens_set(), x, policy, 0.5, 0, rng);
  CHECK((fine.corrupted - fine.exact).norm() <= fine.zeta * policy.p_bar + 1e-12);

  // higher precision costs more sweeps
  CHECK(fine.sweeps >= coarse.sweeps);
  CHECK(fine.sweeps > 0);
}

TEST_CASE("error rng substreams are deterministic and the unit vectors normalized") {
  ErrorRng a = ErrorRng::substream(42, 7);
  ErrorRng b = ErrorRng::substream(42, 7);
  ErrorRng c = ErrorRng::substream(42, 8);
  const Eigen::VectorXd va = a.next_unit_vector(3);
  const Eigen::VectorXd vb = b.next_unit_vector(3);
  const Eigen::VectorXd vc = c.next_unit_vector(3);
  CHECK((va - vb).norm() == 0.0);
  CHECK((va - vc).norm() > 0.0);
  CHECK(std::abs(va.norm() - 1.0) < 1e-12);
}

TEST_CASE("projection error series requires an enabled audit") {
  ProjectionAudit audit;
  CHECK_THROWS_AS(projection_error_series(audit), std::runtime_error);
  audit.enabled = true;
  audit.error.setConstant(3, 2, 0.5);
  CHECK(projection_error_series(audit).rows() == 3);
}
