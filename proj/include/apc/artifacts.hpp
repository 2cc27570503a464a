#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "apc/checks.hpp"
#include "apc/dynamics.hpp"
#include "apc/graph.hpp"

namespace apc {

inline constexpr const char* kToolVersion = "0.1.0";

/// Column-labelled numeric table; the CSV files and every figure are
/// rendered from this representation, so plots are projections of the CSV.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when missing
};

/// t, x1_1 .. xN_n, gamma1..N, alpha1..N.
CsvTable state_table(const Trajectory& traj);
/// t, dist_sync, dist_local1..N, gamma_s, alpha_s, W_x, Z_x, W_gamma,
/// W_alpha and, when include_audit, proj_err1..N.
CsvTable metric_table(const Trajectory& traj, bool include_audit);

/// Serializes with 17 significant digits so doubles round-trip exactly.
std::string csv_to_string(const CsvTable& table);

struct RunResult {
  Trajectory traj;
  LaplacianData lap;
  PrecisionReport precision;
  GainBallReport gain_ball;
  GainAverageReport averages;
  double wall_seconds = 0.0;
};

/// simulate + all checkers; the gain-average drop slack is 1e-9 * dt.
RunResult run_scenario(const ScenarioConfig& cfg);

struct RunManifest {
  std::string scenario;
  std::string out_dir;
  std::vector<std::string> artifacts;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
};

struct RunOptions {
  std::string out_dir;
  std::string scenario_label;
  bool audit_csv = false;  // emit the proj_err columns in metrics.csv
};

/// Writes trajectory.csv, metrics.csv, report.json, the figures (phase
/// portrait, gain traces, projection errors) and run_manifest.json into
/// out_dir; returns the manifest. The projection-error figure is named
/// fig3.svg under the zeta rule alpha*zeta <= 1 and fig4.svg under a
/// relaxed rule, mirroring the two experiment variants.
RunManifest write_artifacts(const RunResult& result, const ScenarioConfig& cfg,
                            const RunOptions& options);

std::string report_json(const RunResult& result, const ScenarioConfig& cfg);

/// SVG renderers (pure functions of the tables plus static set geometry).
std::string render_phase_portrait(const CsvTable& states, const ScenarioConfig& cfg);
std::string render_gain_traces(const CsvTable& states, int n_agents);
std::string render_projection_errors(const CsvTable& metrics, int n_agents);

/// Parameter sweep: explicit value lists per scenario key, expanded as a
/// cross product in sorted-key odometer order. Supported keys: epsilon,
/// k_gamma, k_alpha, dt, horizon, seed, zeta_rule, p_bar.
struct SweepGrid {
  std::map<std::string, std::vector<double>> values;
};

struct SweepRow {
  std::map<std::string, double> point;
  std::string status;  // "ok" or the failure reason; the sweep continues past failures
  PrecisionReport precision;
  GainBallReport gain_ball;
};

ScenarioConfig apply_override(ScenarioConfig cfg, const std::string& key, double value);
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepGrid& grid);
CsvTable sweep_table(const std::vector<SweepRow>& rows);

/// Grid file: {"grid": {key: [values...]}} plus either "builtin" or
/// "scenario" naming the base configuration.
struct SweepSpec {
  ScenarioConfig base;
  SweepGrid grid;
};
SweepSpec load_sweep_spec(const std::string& path);

}  // namespace apc
