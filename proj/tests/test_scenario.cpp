#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "apc/scenario.hpp"

using namespace apc;

namespace {

const char* kMinimalScenario = R"({
  "name": "two-disks",
  "graph": {"weights": [[0, "1/2"], [1, 0]]},
  "dim": 2,
  "sets": [
    {"members": [{"kind": "ball", "center": [0, 0], "radius": 1.5}]},
    {"members": [{"kind": "ball", "center": [0.5, 0], "radius": 1.5},
                 {"kind": "halfspace", "normal": [1, 0], "offset": 2}]}
  ],
  "epsilon": "3/10",
  "k_gamma": 2,
  "k_alpha": 1,
  "corruption": {"mode": "synthetic", "p_bar": 0.05, "direction": "fixed-unit-vector",
                 "zeta_rule": 1},
  "dt": 0.01,
  "horizon": 2,
  "x0": [[2, 0], [0, 2]],
  "gamma0": [1, 1],
  "alpha0": ["1/2", 1],
  "integrator": "rk4",
  "seed": 9
})";

std::string write_temp(const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / "apc_scenario_test.json";
  std::ofstream out(path);
  out << text;
  return path.string();
}

}  // namespace

TEST_CASE("builtin experiment carries the published values verbatim") {
  const ScenarioConfig cfg = builtin_scenario("paper-sec5");
  CHECK(cfg.graph.n_agents == 3);
  CHECK(cfg.dim == 2);

  Eigen::MatrixXd expected_lap(3, 3);
  expected_lap << 1, -1, 0, 0, 2, -2, -1, -0.5, 1.5;
  CHECK((build_laplacian(cfg.graph) - expected_lap).cwiseAbs().maxCoeff() == 0.0);

  CHECK(cfg.epsilon == 0.3);
  CHECK(cfg.k_gamma == 10.0);
  CHECK(cfg.k_alpha == 1.0);
  CHECK(cfg.dt == 1e-2);
  CHECK(cfg.horizon == 5.0);

  Eigen::VectorXd x0(6);
  x0 << 3, 4, 5, 1.5, -3, 4;
  CHECK((cfg.x0 - x0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cfg.gamma0(0) == doctest::Approx(-0.12).epsilon(1e-15));
  CHECK(cfg.gamma0(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cfg.gamma0(2) == 1.0);
  CHECK(cfg.alpha0(0) == 0.25);
  CHECK(cfg.alpha0(1) == -1.5);
  CHECK(cfg.alpha0(2) == 0.5);

  REQUIRE(cfg.sets.size() == 3);
  for (const auto& set : cfg.sets) REQUIRE(set.members.size() == 3);
  const auto& q1 = std::get<Ellipsoid>(cfg.sets[0].members[0]);
  CHECK(q1.shape()(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(q1.shape()(0, 1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(q1.shape()(1, 1) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  const auto& q3 = std::get<Ellipsoid>(cfg.sets[2].members[2]);
  CHECK(q3.shape()(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK((q3.center() - Eigen::Vector2d(1, 0)).norm() == 0.0);

  CHECK(cfg.corruption.mode == ProjectionMode::synthetic);
  CHECK(cfg.corruption.zeta_alpha_cap == 1.0);
  CHECK(cfg.integrator == Integrator::euler);
}

TEST_CASE("unknown builtin names are rejected") {
  CHECK_THROWS_AS(builtin_scenario("paper-sec6"), std::invalid_argument);
  CHECK(builtin_scenario_names().size() == 2);
}

TEST_CASE("scenario files parse with rational entries") {
  const std::string path = write_temp(kMinimalScenario);
  const ScenarioConfig cfg = load_scenario(path);
  std::remove(path.c_str());

  CHECK(cfg.name == "two-disks");
  CHECK(cfg.graph.weights(0, 1) == 0.5);
  CHECK(cfg.epsilon == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(cfg.alpha0(0) == 0.5);
  CHECK(cfg.integrator == Integrator::rk4);
  CHECK(cfg.corruption.direction == ErrorDirection::fixed_unit);
  CHECK(cfg.seed == 9);
  REQUIRE(cfg.sets[1].members.size() == 2);
  const auto& plane = std::get<Halfspace>(cfg.sets[1].members[1]);
  CHECK(plane.normal(0) == 1.0);
  CHECK(plane.offset == 2.0);
}

TEST_CASE("missing files and malformed documents give diagnostics") {
  CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/path.json"),
                       "scenario: cannot open file '/nonexistent/path.json'",
                       std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json_text("{ not json", "inline"), std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json_text("{}", "inline"), std::runtime_error);
}

TEST_CASE("self-arcs are rejected at load") {
  std::string text = kMinimalScenario;
  const auto pos = text.find("[[0, \"1/2\"], [1, 0]]");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("[[0, \"1/2\"], [1, 0]]").size(), "[[1, \"1/2\"], [1, 0]]");
  CHECK_THROWS_WITH_AS(scenario_from_json_text(text, "inline"),
                       "digraph: self-arc weight a_11 must be zero (no self-arcs)",
                       std::invalid_argument);
}

TEST_CASE("nonpositive epsilon is rejected at load") {
  std::string text = kMinimalScenario;
  const auto pos = text.find("\"epsilon\": \"3/10\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"epsilon\": \"3/10\"").size(), "\"epsilon\": 0");
  CHECK_THROWS_WITH_AS(scenario_from_json_text(text, "inline"),
                       "scenario: epsilon must be positive", std::invalid_argument);
}

TEST_CASE("unknown enums are rejected with their offending value") {
  std::string text = kMinimalScenario;
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string t = kMinimalScenario;
    const auto p = t.find(from);
    REQUIRE(p != std::string::npos);
    t.replace(p, from.size(), to);
    return t;
  };
  CHECK_THROWS_AS(scenario_from_json_text(replace("\"rk4\"", "\"rk5\""), "inline"),
                  std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json_text(replace("\"synthetic\"", "\"magic\""), "inline"),
                  std::runtime_error);
  CHECK_THROWS_AS(
      scenario_from_json_text(replace("\"fixed-unit-vector\"", "\"somewhere\""), "inline"),
      std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json_text(replace("\"kind\": \"ball\"", "\"kind\": \"cube\""),
                                          "inline"),
                  std::runtime_error);
}

TEST_CASE("zero rational denominators are rejected") {
  std::string text = kMinimalScenario;
  const auto pos = text.find("\"3/10\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 6, "\"3/0\"");
  CHECK_THROWS_AS(scenario_from_json_text(text, "inline"), std::runtime_error);
}
