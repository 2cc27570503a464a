#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "apc/artifacts.hpp"
#include "apc/scenario.hpp"

#include <json.hpp>

using namespace apc;

namespace {

ScenarioConfig short_sec5() {
  ScenarioConfig cfg = builtin_scenario("paper-sec5");
  cfg.horizon = 0.5;
  return cfg;
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("apc_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("state and metric tables carry the documented columns") {
  const RunResult result = run_scenario(short_sec5());
  const CsvTable states = state_table(result.traj);
  CHECK(states.header.front() == "t");
  CHECK(states.column("x1_1") == 1);
  CHECK(states.column("x3_2") == 6);
  CHECK(states.column("gamma1") == 7);
  CHECK(states.column("alpha3") == 12);
  CHECK(states.rows.size() == static_cast<std::size_t>(result.traj.n_samples()));

  const CsvTable metrics = metric_table(result.traj, true);
  for (const char* name : {"t", "dist_sync", "dist_local1", "dist_local3", "gamma_s", "alpha_s",
                           "W_x", "Z_x", "W_gamma", "W_alpha", "proj_err1", "proj_err3"}) {
    CHECK(metrics.column(name) >= 0);
  }
  CHECK(metric_table(result.traj, false).column("proj_err1") == -1);
}

TEST_CASE("csv serialization round-trips doubles exactly") {
  CsvTable table;
  table.header = {"a", "b"};
  table.rows.push_back({0.1, 1.0 / 3.0});
  table.rows.push_back({1e-17, 123456789.123456789});
  const std::string text = csv_to_string(table);

  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  for (const auto& row : table.rows) {
    std::getline(in, line);
    const auto comma = line.find(',');
    CHECK(std::strtod(line.substr(0, comma).c_str(), nullptr) == row[0]);
    CHECK(std::strtod(line.substr(comma + 1).c_str(), nullptr) == row[1]);
  }
}

TEST_CASE("identical seeds give byte-identical csv text") {
  const ScenarioConfig cfg = short_sec5();
  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);
  CHECK(csv_to_string(state_table(a.traj)) == csv_to_string(state_table(b.traj)));
  CHECK(csv_to_string(metric_table(a.traj, true)) == csv_to_string(metric_table(b.traj, true)));
}

TEST_CASE("figures are rendered from the csv tables only") {
  const ScenarioConfig cfg = short_sec5();
  const RunResult result = run_scenario(cfg);
  const CsvTable states = state_table(result.traj);
  const CsvTable metrics = metric_table(result.traj, true);

  const std::string fig1 = render_phase_portrait(states, cfg);
  CHECK(fig1.find("<svg") == 0);
  CHECK(fig1.find("</svg>") != std::string::npos);
  CHECK(fig1.find("polyline") != std::string::npos);

  const std::string fig2 = render_gain_traces(states, cfg.graph.n_agents);
  CHECK(fig2.find("</svg>") != std::string::npos);

  const std::string fig3 = render_projection_errors(metrics, cfg.graph.n_agents);
  CHECK(fig3.find("</svg>") != std::string::npos);

  // a table missing the needed columns cannot be plotted
  const CsvTable no_audit = metric_table(result.traj, false);
  CHECK_THROWS_AS(render_projection_errors(no_audit, cfg.graph.n_agents),
                  std::invalid_argument);
}

TEST_CASE("report json summarizes the checkers") {
  const ScenarioConfig cfg = short_sec5();
  const RunResult result = run_scenario(cfg);
  const nlohmann::json doc = nlohmann::json::parse(report_json(result, cfg));
  CHECK(doc.at("scenario") == "paper-sec5");
  CHECK(doc.at("samples") == result.traj.n_samples());
  CHECK(doc.at("precision").contains("sync_ok"));
  CHECK(doc.at("gain_ball").contains("d_e_gamma"));
  CHECK(doc.at("gain_averages").at("rates_equal").get<bool>());
  CHECK(doc.contains("mean_projection_error"));
}

TEST_CASE("write_artifacts emits exactly the files listed in the manifest") {
  const ScenarioConfig cfg = short_sec5();
  const RunResult result = run_scenario(cfg);
  const auto dir = temp_dir("artifacts");

  RunOptions options;
  options.out_dir = dir.string();
  options.audit_csv = true;
  const RunManifest manifest = write_artifacts(result, cfg, options);

  for (const auto& name : manifest.artifacts) {
    CHECK(std::filesystem::exists(dir / name));
  }
  // everything emitted is listed: no extra files in the directory
  std::size_t on_disk = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    (void)entry;
    ++on_disk;
  }
  CHECK(on_disk == manifest.artifacts.size());
  CHECK(std::filesystem::exists(dir / "fig3.svg"));  // zeta rule C = 1
  std::filesystem::remove_all(dir);
}

TEST_CASE("relaxed zeta rule emits fig4 instead of fig3") {
  ScenarioConfig cfg = short_sec5();
  cfg.corruption.zeta_alpha_cap = 300.0;
  const RunResult result = run_scenario(cfg);
  const auto dir = temp_dir("fig4");
  RunOptions options;
  options.out_dir = dir.string();
  options.audit_csv = true;
  write_artifacts(result, cfg, options);
  CHECK(std::filesystem::exists(dir / "fig4.svg"));
  CHECK_FALSE(std::filesystem::exists(dir / "fig3.svg"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a one-point sweep reproduces the single run") {
  const ScenarioConfig base = short_sec5();
  SweepGrid grid;
  grid.values["epsilon"] = {0.3};
  const std::vector<SweepRow> rows = run_sweep(base, grid);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "ok");

  const RunResult single = run_scenario(base);
  CHECK(rows[0].precision.sync_ok == single.precision.sync_ok);
  CHECK(rows[0].precision.opt_ok == single.precision.opt_ok);
  // the short horizon never enters the tube: both times are NaN
  CHECK(std::isnan(rows[0].precision.t_sync) == std::isnan(single.precision.t_sync));
  if (!std::isnan(single.precision.t_sync)) {
    CHECK(rows[0].precision.t_sync == single.precision.t_sync);
  }
}

TEST_CASE("k_gamma sweep shrinks the gain-consensus ball as k^-2 and both rows pass") {
  SweepGrid grid;
  grid.values["k_gamma"] = {1.0, 10.0};
  const std::vector<SweepRow> rows = run_sweep(builtin_scenario("paper-sec5"), grid);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.status == "ok");
    CHECK(row.gain_ball.all_ok());
  }
  CHECK(rows[0].point.at("k_gamma") == 1.0);
  CHECK(rows[1].gain_ball.d_e_gamma ==
        doctest::Approx(rows[0].gain_ball.d_e_gamma / 100.0).epsilon(1e-12));
}

TEST_CASE("epsilon sweep emits one row per grid point in deterministic order") {
  ScenarioConfig base = short_sec5();
  SweepGrid grid;
  grid.values["epsilon"] = {0.1, 0.3, 1.0};
  const std::vector<SweepRow> rows = run_sweep(base, grid);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].point.at("epsilon") == 0.1);
  CHECK(rows[2].point.at("epsilon") == 1.0);
  const CsvTable table = sweep_table(rows);
  CHECK(table.column("epsilon") == 0);
  CHECK(table.column("t_sync") >= 0);
  CHECK(table.rows.size() == 3);
}

TEST_CASE("sweeps record per-row failures and continue") {
  SweepGrid grid;
  grid.values["epsilon"] = {-1.0, 0.3};
  const std::vector<SweepRow> rows = run_sweep(short_sec5(), grid);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status != "ok");
  CHECK(rows[1].status == "ok");
}

TEST_CASE("cross-product grids expand in sorted-key odometer order") {
  SweepGrid grid;
  grid.values["k_gamma"] = {1.0, 2.0};
  grid.values["epsilon"] = {0.3, 0.4, 0.5};
  ScenarioConfig base = short_sec5();
  base.horizon = 0.05;  // keep the 6 runs cheap
  const std::vector<SweepRow> rows = run_sweep(base, grid);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].point.at("epsilon") == 0.3);
  CHECK(rows[0].point.at("k_gamma") == 1.0);
  CHECK(rows[1].point.at("k_gamma") == 2.0);  // last key fastest
  CHECK(rows[2].point.at("epsilon") == 0.4);
}

TEST_CASE("unsupported sweep keys are rejected") {
  CHECK_THROWS_AS(apply_override(short_sec5(), "gravity", 9.8), std::invalid_argument);
  SweepGrid empty;
  CHECK_THROWS_AS(run_sweep(short_sec5(), empty), std::invalid_argument);
}
