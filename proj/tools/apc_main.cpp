#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "apc/artifacts.hpp"
#include "apc/scenario.hpp"

namespace {

int run_command(const std::string& scenario_path, const std::string& builtin,
                const std::string& out_dir, std::uint64_t seed, bool seed_set,
                const std::string& integrator, double zeta_rule, bool zeta_set, bool audit,
                bool assert_flag, const std::string& sweep_path) {
  using namespace apc;

  if (!sweep_path.empty()) {
    SweepSpec spec = load_sweep_spec(sweep_path);
    if (seed_set) spec.base.seed = seed;
    const std::vector<SweepRow> rows = run_sweep(spec.base, spec.grid);
    std::filesystem::create_directories(out_dir);
    const std::string csv = csv_to_string(sweep_table(rows));
    std::ofstream out(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
    out << csv;
    int failures = 0;
    for (const auto& row : rows) {
      std::cout << "sweep point:";
      for (const auto& [key, value] : row.point) std::cout << ' ' << key << '=' << value;
      std::cout << " -> " << row.status << '\n';
      if (row.status != "ok") ++failures;
    }
    std::cout << "sweep.csv written to " << out_dir << " (" << rows.size() << " rows, "
              << failures << " failed)\n";
    return failures == 0 ? 0 : 1;
  }

  ScenarioConfig cfg;
  std::string label;
  if (!scenario_path.empty()) {
    cfg = load_scenario(scenario_path);
    label = scenario_path;
  } else {
    cfg = builtin_scenario(builtin);
    label = builtin;
  }
  if (seed_set) cfg.seed = seed;
  if (!integrator.empty()) {
    if (integrator == "euler") cfg.integrator = Integrator::euler;
    else if (integrator == "rk4") cfg.integrator = Integrator::rk4;
    else throw std::invalid_argument("unknown integrator '" + integrator + "'");
  }
  if (zeta_set) cfg.corruption.zeta_alpha_cap = zeta_rule;

  const RunResult result = run_scenario(cfg);
  RunOptions options;
  options.out_dir = out_dir;
  options.scenario_label = label;
  options.audit_csv = audit;
  const RunManifest manifest = write_artifacts(result, cfg, options);

  std::cout << "scenario " << label << ": " << result.traj.n_samples() << " samples in "
            << result.wall_seconds << " s\n";
  std::cout << "  sync_ok=" << result.precision.sync_ok << " opt_ok=" << result.precision.opt_ok
            << " gains_bounded=" << result.precision.gains_bounded
            << " gain_ball_ok=" << result.gain_ball.all_ok()
            << " averages_ok=" << result.averages.all_ok() << '\n';
  if (result.traj.aborted()) {
    std::cerr << "run aborted: " << result.traj.abort_reason << '\n';
    return 1;
  }
  std::cout << "artifacts in " << manifest.out_dir << ":";
  for (const auto& name : manifest.artifacts) std::cout << ' ' << name;
  std::cout << '\n';

  if (assert_flag) {
    const bool ok =
        result.precision.all_ok() && result.gain_ball.all_ok() && result.averages.all_ok();
    if (!ok) {
      std::cerr << "assertion failed: see " << out_dir << "/report.json\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for adaptive projected-consensus networks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "simulate a scenario (or a sweep grid) and emit artifacts");
  std::string scenario_path, builtin = "paper-sec5", out_dir = "out", integrator, sweep_path;
  std::uint64_t seed = 0;
  double zeta_rule = 1.0;
  bool audit = false, assert_flag = false;

  auto* scenario_opt = run->add_option("--scenario", scenario_path, "scenario JSON file");
  run->add_option("--builtin", builtin, "builtin scenario name (default paper-sec5)")
      ->excludes(scenario_opt);
  run->add_option("--out", out_dir, "output directory (default ./out)");
  auto* seed_opt = run->add_option("--seed", seed, "override the RNG seed");
  run->add_option("--integrator", integrator, "euler or rk4")
      ->check(CLI::IsMember({"euler", "rk4"}));
  auto* zeta_opt =
      run->add_option("--zeta-rule", zeta_rule, "bound C in the precision rule alpha*zeta <= C");
  run->add_flag("--audit-projections", audit, "emit proj_err columns and the error figure");
  run->add_flag("--assert", assert_flag, "exit nonzero unless all checks pass");
  run->add_option("--sweep", sweep_path, "sweep grid JSON file (runs the whole grid)");

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(scenario_path, builtin, out_dir, seed, seed_opt->count() > 0, integrator,
                       zeta_rule, zeta_opt->count() > 0, audit, assert_flag, sweep_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}
