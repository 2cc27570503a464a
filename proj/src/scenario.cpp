#include "apc/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace apc {

namespace {

using nlohmann::json;

// Accepts 0.5, "0.5", or "1/2".
double parse_number(const json& node, const std::string& key) {
  if (node.is_number()) return node.get<double>();
  if (node.is_string()) {
    const std::string text = node.get<std::string>();
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return std::stod(text);
      const double num = std::stod(text.substr(0, slash));
      const double den = std::stod(text.substr(slash + 1));
      if (den == 0.0) throw std::invalid_argument("zero denominator");
      return num / den;
    } catch (const std::exception&) {
      throw std::runtime_error("scenario: cannot parse numeric value '" + text + "' for " + key);
    }
  }
  throw std::runtime_error("scenario: expected a number or rational string for " + key);
}

Eigen::VectorXd parse_vector(const json& node, const std::string& key) {
  if (!node.is_array()) throw std::runtime_error("scenario: expected an array for " + key);
  Eigen::VectorXd out(node.size());
  for (std::size_t k = 0; k < node.size(); ++k) out(k) = parse_number(node[k], key);
  return out;
}

// Flattens nested arrays (list of per-agent blocks) or accepts a flat list.
Eigen::VectorXd parse_stacked(const json& node, const std::string& key) {
  if (!node.is_array()) throw std::runtime_error("scenario: expected an array for " + key);
  if (!node.empty() && node[0].is_array()) {
    std::vector<double> flat;
    for (const auto& block : node) {
      for (const auto& entry : block) flat.push_back(parse_number(entry, key));
    }
    return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  }
  return parse_vector(node, key);
}

Eigen::MatrixXd parse_matrix(const json& node, const std::string& key) {
  if (!node.is_array() || node.empty() || !node[0].is_array()) {
    throw std::runtime_error("scenario: expected a row-major matrix (array of rows) for " + key);
  }
  const auto rows = node.size();
  const auto cols = node[0].size();
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (node[i].size() != cols) {
      throw std::runtime_error("scenario: ragged matrix rows for " + key);
    }
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = parse_number(node[i][j], key);
  }
  return out;
}

ConvexMember parse_member(const json& node, const std::string& context) {
  const std::string kind = node.value("kind", "ellipsoid");
  if (kind == "ellipsoid") {
    return Ellipsoid(parse_vector(node.at("center"), context + ".center"),
                     parse_matrix(node.at("shape"), context + ".shape"));
  }
  if (kind == "ball") {
    return Ellipsoid::ball(parse_vector(node.at("center"), context + ".center"),
                           parse_number(node.at("radius"), context + ".radius"));
  }
  if (kind == "halfspace") {
    return Halfspace{parse_vector(node.at("normal"), context + ".normal"),
                     parse_number(node.at("offset"), context + ".offset")};
  }
  throw std::runtime_error("scenario: unknown set member kind '" + kind + "' in " + context);
}

CorruptionPolicy parse_corruption(const json& node, int n_agents) {
  CorruptionPolicy policy;
  const std::string mode = node.value("mode", "exact");
  if (mode == "exact") policy.mode = ProjectionMode::exact;
  else if (mode == "synthetic") policy.mode = ProjectionMode::synthetic;
  else if (mode == "iterative") policy.mode = ProjectionMode::iterative;
  else throw std::runtime_error("scenario: unknown corruption mode '" + mode + "'");

  policy.p_bar = node.contains("p_bar") ? parse_number(node.at("p_bar"), "corruption.p_bar") : 0.0;

  const std::string dir = node.value("direction", "seeded-random-unit");
  if (dir == "fixed-unit-vector") policy.direction = ErrorDirection::fixed_unit;
  else if (dir == "seeded-random-unit") policy.direction = ErrorDirection::seeded_random_unit;
  else if (dir == "adversarial-outward") policy.direction = ErrorDirection::adversarial_outward;
  else throw std::runtime_error("scenario: unknown corruption direction '" + dir + "'");

  if (node.contains("zeta_rule")) {
    policy.zeta_alpha_cap = parse_number(node.at("zeta_rule"), "corruption.zeta_rule");
  }
  if (node.contains("zeta")) {
    policy.fixed_zeta = parse_vector(node.at("zeta"), "corruption.zeta");
  }
  if (policy.fixed_zeta && policy.fixed_zeta->size() != n_agents) {
    throw std::runtime_error("scenario: corruption.zeta must have one entry per agent");
  }
  return policy;
}

ScenarioConfig from_json(const json& doc, const std::string& origin) {
  ScenarioConfig cfg;
  cfg.name = doc.value("name", origin);

  const json& graph = doc.at("graph");
  cfg.graph.weights = parse_matrix(graph.at("weights"), "graph.weights");
  cfg.graph.n_agents = static_cast<int>(cfg.graph.weights.rows());

  cfg.dim = doc.at("dim").get<int>();

  for (const auto& set_node : doc.at("sets")) {
    IntersectionSet set;
    const json& members = set_node.contains("members") ? set_node.at("members") : set_node;
    for (std::size_t m = 0; m < members.size(); ++m) {
      set.members.push_back(parse_member(members[m], "sets[" + std::to_string(m) + "]"));
    }
    cfg.sets.push_back(std::move(set));
  }

  cfg.epsilon = parse_number(doc.at("epsilon"), "epsilon");
  cfg.k_gamma = parse_number(doc.at("k_gamma"), "k_gamma");
  cfg.k_alpha = parse_number(doc.at("k_alpha"), "k_alpha");
  if (doc.contains("corruption")) {
    cfg.corruption = parse_corruption(doc.at("corruption"), cfg.graph.n_agents);
  }
  cfg.dt = parse_number(doc.at("dt"), "dt");
  cfg.horizon = parse_number(doc.at("horizon"), "horizon");
  cfg.x0 = parse_stacked(doc.at("x0"), "x0");
  cfg.gamma0 = parse_vector(doc.at("gamma0"), "gamma0");
  cfg.alpha0 = parse_vector(doc.at("alpha0"), "alpha0");

  const std::string integrator = doc.value("integrator", "euler");
  if (integrator == "euler") cfg.integrator = Integrator::euler;
  else if (integrator == "rk4") cfg.integrator = Integrator::rk4;
  else throw std::runtime_error("scenario: unknown integrator '" + integrator + "'");

  cfg.seed = doc.value("seed", 0ULL);
  cfg.freeze_gains = doc.value("freeze_gains", false);
  cfg.corrupted_gain_input = doc.value("corrupted_gain_input", false);
  if (doc.contains("projection_tol")) {
    cfg.projection_tol = parse_number(doc.at("projection_tol"), "projection_tol");
  }

  validate_scenario(cfg);
  return cfg;
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::runtime_error("scenario: parse error in " + origin + ": " + err.what());
  }
  try {
    return from_json(doc, origin);
  } catch (const json::exception& err) {
    throw std::runtime_error("scenario: invalid document " + origin + ": " + err.what());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("scenario: cannot open file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str(), path);
}

namespace {

ScenarioConfig make_paper_sec5() {
  ScenarioConfig cfg;
  cfg.name = "paper-sec5";
  cfg.graph.n_agents = 3;
  cfg.graph.weights.setZero(3, 3);
  cfg.graph.weights(0, 1) = 1.0;        // edge 2 -> 1
  cfg.graph.weights(1, 2) = 2.0;        // edge 3 -> 2
  cfg.graph.weights(2, 0) = 1.0;        // edge 1 -> 3
  cfg.graph.weights(2, 1) = 0.5;        // edge 2 -> 3
  cfg.dim = 2;

  Eigen::MatrixXd q1(2, 2), q2(2, 2), q3(2, 2);
  q1 << 1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 7.0 / 9.0;
  q2 << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 7.0 / 9.0;
  q3 = 0.7 * Eigen::MatrixXd::Identity(2, 2);
  const std::vector<Eigen::MatrixXd> shapes = {q1, q2, q3};
  const std::vector<Eigen::Vector2d> centers = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
  for (const auto& center : centers) {
    IntersectionSet set;
    for (const auto& shape : shapes) {
      set.members.emplace_back(Ellipsoid(center, shape));
    }
    cfg.sets.push_back(std::move(set));
  }

  cfg.epsilon = 0.3;
  cfg.k_gamma = 10.0;
  cfg.k_alpha = 1.0;
  cfg.dt = 1e-2;
  cfg.horizon = 5.0;
  cfg.x0.resize(6);
  cfg.x0 << 3.0, 4.0, 5.0, 1.5, -3.0, 4.0;
  cfg.gamma0.resize(3);
  cfg.gamma0 << -3.0 / 25.0, 2.0 / 3.0, 1.0;
  cfg.alpha0.resize(3);
  cfg.alpha0 << 0.25, -1.5, 0.5;

  cfg.corruption.mode = ProjectionMode::synthetic;
  cfg.corruption.p_bar = 0.1;
  cfg.corruption.direction = ErrorDirection::seeded_random_unit;
  cfg.corruption.zeta_alpha_cap = 1.0;

  cfg.integrator = Integrator::euler;
  cfg.seed = 1;
  return cfg;
}

ScenarioConfig make_unit_disk() {
  ScenarioConfig cfg;
  cfg.name = "unit-disk";
  cfg.graph.n_agents = 1;
  cfg.graph.weights.setZero(1, 1);
  cfg.dim = 2;
  IntersectionSet set;
  set.members.emplace_back(Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0));
  cfg.sets.push_back(std::move(set));
  cfg.epsilon = 0.1;
  cfg.k_gamma = 1.0;
  cfg.k_alpha = 1.0;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  cfg.x0 = Eigen::Vector2d(2.0, 0.0);
  cfg.gamma0 = Eigen::VectorXd::Ones(1);
  cfg.alpha0 = Eigen::VectorXd::Ones(1);
  cfg.freeze_gains = true;
  cfg.corruption.mode = ProjectionMode::exact;
  cfg.integrator = Integrator::euler;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig cfg;
  if (name == "paper-sec5") cfg = make_paper_sec5();
  else if (name == "unit-disk") cfg = make_unit_disk();
  else throw std::invalid_argument("unknown builtin scenario '" + name + "'");
  validate_scenario(cfg);
  return cfg;
}

std::vector<std::string> builtin_scenario_names() { return {"paper-sec5", "unit-disk"}; }

}  // namespace apc
