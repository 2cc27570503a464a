#include "apc/artifacts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "apc/metrics.hpp"
#include "apc/scenario.hpp"

namespace apc {

namespace {

std::string format17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << content;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable state_table(const Trajectory& traj) {
  CsvTable table;
  table.header.push_back("t");
  for (int i = 0; i < traj.n_agents; ++i) {
    for (int d = 0; d < traj.dim; ++d) {
      table.header.push_back("x" + std::to_string(i + 1) + "_" + std::to_string(d + 1));
    }
  }
  for (int i = 0; i < traj.n_agents; ++i) table.header.push_back("gamma" + std::to_string(i + 1));
  for (int i = 0; i < traj.n_agents; ++i) table.header.push_back("alpha" + std::to_string(i + 1));

  for (int k = 0; k < traj.n_samples(); ++k) {
    std::vector<double> row;
    row.reserve(table.header.size());
    row.push_back(traj.times[k]);
    for (Eigen::Index c = 0; c < traj.x.cols(); ++c) row.push_back(traj.x(k, c));
    for (int i = 0; i < traj.n_agents; ++i) row.push_back(traj.gamma(k, i));
    for (int i = 0; i < traj.n_agents; ++i) row.push_back(traj.alpha(k, i));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable metric_table(const Trajectory& traj, bool include_audit) {
  if (!traj.channels.filled) {
    throw std::invalid_argument("metric_table: trajectory has no metric channels");
  }
  CsvTable table;
  table.header = {"t", "dist_sync"};
  for (int i = 0; i < traj.n_agents; ++i) table.header.push_back("dist_local" + std::to_string(i + 1));
  table.header.insert(table.header.end(),
                      {"gamma_s", "alpha_s", "W_x", "Z_x", "W_gamma", "W_alpha"});
  if (include_audit) {
    for (int i = 0; i < traj.n_agents; ++i) table.header.push_back("proj_err" + std::to_string(i + 1));
  }

  const MetricChannels& ch = traj.channels;
  for (int k = 0; k < traj.n_samples(); ++k) {
    std::vector<double> row;
    row.reserve(table.header.size());
    row.push_back(traj.times[k]);
    row.push_back(ch.dist_sync(k));
    for (int i = 0; i < traj.n_agents; ++i) row.push_back(ch.dist_local(k, i));
    row.push_back(ch.gamma_s(k));
    row.push_back(ch.alpha_s(k));
    row.push_back(ch.w_x(k));
    row.push_back(ch.z_x(k));
    row.push_back(ch.w_gamma(k));
    row.push_back(ch.w_alpha(k));
    if (include_audit) {
      for (int i = 0; i < traj.n_agents; ++i) row.push_back(traj.audit.error(k, i));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string csv_to_string(const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c > 0) out << ',';
    out << table.header[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format17(row[c]);
    }
    out << '\n';
  }
  return out.str();
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  result.traj = simulate(cfg);
  result.lap = laplacian_data(cfg.graph);
  result.precision = check_precision_targets(result.traj, cfg.epsilon);
  result.gain_ball = check_gain_ball(result.traj, result.lap, cfg.k_gamma, cfg.k_alpha);
  result.averages = check_gain_averages(result.traj, cfg, result.lap, 1e-9 * cfg.dt);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string report_json(const RunResult& result, const ScenarioConfig& cfg) {
  nlohmann::json doc;
  doc["scenario"] = cfg.name;
  doc["config"] = {{"epsilon", cfg.epsilon},
                   {"k_gamma", cfg.k_gamma},
                   {"k_alpha", cfg.k_alpha},
                   {"dt", cfg.dt},
                   {"horizon", cfg.horizon},
                   {"integrator", cfg.integrator == Integrator::euler ? "euler" : "rk4"},
                   {"seed", cfg.seed},
                   {"zeta_rule", cfg.corruption.zeta_alpha_cap},
                   {"p_bar", cfg.corruption.p_bar}};
  doc["aborted"] = result.traj.aborted();
  doc["abort_reason"] = result.traj.abort_reason;
  doc["samples"] = result.traj.n_samples();
  doc["wall_seconds"] = result.wall_seconds;

  doc["precision"] = {{"sync_ok", result.precision.sync_ok},
                     {"opt_ok", result.precision.opt_ok},
                     {"gains_bounded", result.precision.gains_bounded},
                     {"t_sync", result.precision.t_sync},
                     {"t_opt", result.precision.t_opt}};
  doc["gain_ball"] = {{"d_e_gamma", result.gain_ball.d_e_gamma},
                   {"d_e_alpha", result.gain_ball.d_e_alpha},
                   {"t_gamma", result.gain_ball.t_gamma},
                   {"t_alpha", result.gain_ball.t_alpha},
                   {"gamma_ball_ok", result.gain_ball.gamma_ball_ok},
                   {"alpha_ball_ok", result.gain_ball.alpha_ball_ok},
                   {"gamma_envelope_ok", result.gain_ball.gamma_envelope_ok},
                   {"alpha_envelope_ok", result.gain_ball.alpha_envelope_ok}};
  doc["gain_averages"] = {{"nondecreasing", result.averages.nondecreasing},
                          {"rates_equal", result.averages.rates_equal},
                          {"max_drop", result.averages.max_drop},
                          {"max_rate_gap", result.averages.max_rate_gap}};
  if (result.traj.audit.enabled && result.traj.audit.error.size() > 0) {
    doc["mean_projection_error"] = result.traj.audit.error.mean();
  }
  doc["all_ok"] = result.precision.all_ok() && result.gain_ball.all_ok() && result.averages.all_ok();
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG rendering

namespace {

struct Bounds {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  void grow(double x, double y) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  void pad(double fraction) {
    const double dx = std::max(1e-9, (x_max - x_min) * fraction);
    const double dy = std::max(1e-9, (y_max - y_min) * fraction);
    x_min -= dx; x_max += dx;
    y_min -= dy; y_max += dy;
  }
};

constexpr int kWidth = 720;
constexpr int kHeight = 520;
constexpr int kMargin = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

class SvgCanvas {
 public:
  SvgCanvas(Bounds bounds, std::string title, std::string x_label, std::string y_label)
      : bounds_(bounds) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
         << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out_ << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    frame(std::move(x_label), std::move(y_label));
  }

  double px(double x) const {
    return kMargin + (x - bounds_.x_min) / (bounds_.x_max - bounds_.x_min) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin -
           (y - bounds_.y_min) / (bounds_.y_max - bounds_.y_min) * (kHeight - 2 * kMargin);
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double width, bool dashed = false) {
    out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
    if (dashed) out_ << " stroke-dasharray=\"5 4\"";
    out_ << " points=\"";
    for (std::size_t k = 0; k < xs.size(); ++k) {
      out_ << px(xs[k]) << ',' << py(ys[k]) << ' ';
    }
    out_ << "\"/>\n";
  }

  void marker(double x, double y, const std::string& color) {
    out_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"" << color
         << "\"/>\n";
  }

  void legend_entry(int slot, const std::string& color, const std::string& label) {
    const double y = kMargin + 8 + 18 * slot;
    out_ << "<line x1=\"" << kWidth - kMargin - 110 << "\" y1=\"" << y << "\" x2=\""
         << kWidth - kMargin - 86 << "\" y2=\"" << y << "\" stroke=\"" << color
         << "\" stroke-width=\"2\"/>\n";
    out_ << "<text x=\"" << kWidth - kMargin - 80 << "\" y=\"" << y + 4
         << "\" font-family=\"sans-serif\" font-size=\"12\">" << label << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  void frame(std::string x_label, std::string y_label) {
    out_ << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
         << "\" height=\"" << kHeight - 2 * kMargin
         << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = bounds_.x_min + (bounds_.x_max - bounds_.x_min) * k / 4.0;
      const double fy = bounds_.y_min + (bounds_.y_max - bounds_.y_min) * k / 4.0;
      out_ << "<text x=\"" << px(fx) << "\" y=\"" << kHeight - kMargin + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_tick(fx) << "</text>\n";
      out_ << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_tick(fy) << "</text>\n";
    }
    out_ << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
         << "</text>\n";
    out_ << "<text x=\"16\" y=\"" << kHeight / 2
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
  }

  static std::string format_tick(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.3g", v);
    return buffer;
  }

  Bounds bounds_;
  std::ostringstream out_;
};

std::vector<double> table_column(const CsvTable& table, const std::string& name) {
  const int c = table.column(name);
  if (c < 0) throw std::invalid_argument("figure: missing CSV column '" + name + "'");
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row[c]);
  return out;
}

// 256-point outline of an ellipsoid boundary in the plane.
void ellipse_outline(const Ellipsoid& e, std::vector<double>& xs, std::vector<double>& ys) {
  constexpr int kSamples = 256;
  const Eigen::VectorXd radii = e.shape_eigenvalues().cwiseSqrt().cwiseInverse();
  xs.clear();
  ys.clear();
  for (int k = 0; k <= kSamples; ++k) {
    const double theta = 2.0 * M_PI * k / kSamples;
    Eigen::Vector2d unit(std::cos(theta), std::sin(theta));
    Eigen::Vector2d point =
        e.center().head<2>() + e.basis() * (radii.cwiseProduct(Eigen::VectorXd(unit)));
    xs.push_back(point(0));
    ys.push_back(point(1));
  }
}

}  // namespace

std::string render_phase_portrait(const CsvTable& states, const ScenarioConfig& cfg) {
  const int n_agents = cfg.graph.n_agents;
  Bounds bounds;
  bool first = true;

  std::vector<std::vector<double>> xs(n_agents), ys(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    xs[i] = table_column(states, "x" + std::to_string(i + 1) + "_1");
    ys[i] = table_column(states, "x" + std::to_string(i + 1) + "_2");
    for (std::size_t k = 0; k < xs[i].size(); ++k) {
      if (first) {
        bounds = Bounds{xs[i][k], xs[i][k], ys[i][k], ys[i][k]};
        first = false;
      }
      bounds.grow(xs[i][k], ys[i][k]);
    }
  }
  std::vector<std::vector<double>> ellipse_x, ellipse_y;
  for (const auto& set : cfg.sets) {
    for (const auto& member : set.members) {
      // boundary outlines only exist for planar members
      if (const auto* e = std::get_if<Ellipsoid>(&member); e != nullptr && e->dim() == 2) {
        std::vector<double> ex, ey;
        ellipse_outline(*e, ex, ey);
        for (std::size_t k = 0; k < ex.size(); ++k) bounds.grow(ex[k], ey[k]);
        ellipse_x.push_back(std::move(ex));
        ellipse_y.push_back(std::move(ey));
      }
    }
  }
  bounds.pad(0.06);

  SvgCanvas canvas(bounds, "Agent trajectories and local set boundaries", "first coordinate",
                   "second coordinate");
  for (std::size_t k = 0; k < ellipse_x.size(); ++k) {
    canvas.polyline(ellipse_x[k], ellipse_y[k], "#999999", 1.0, true);
  }
  for (int i = 0; i < n_agents; ++i) {
    const std::string color = kPalette[i % 8];
    canvas.polyline(xs[i], ys[i], color, 1.6);
    canvas.marker(xs[i].front(), ys[i].front(), color);
    canvas.legend_entry(i, color, "agent " + std::to_string(i + 1));
  }
  return canvas.finish();
}

std::string render_gain_traces(const CsvTable& states, int n_agents) {
  const std::vector<double> t = table_column(states, "t");
  Bounds bounds{t.front(), t.back(), 0.0, 0.0};
  std::vector<std::vector<double>> gammas(n_agents), alphas(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    gammas[i] = table_column(states, "gamma" + std::to_string(i + 1));
    alphas[i] = table_column(states, "alpha" + std::to_string(i + 1));
    for (double v : gammas[i]) bounds.grow(t.front(), v);
    for (double v : alphas[i]) bounds.grow(t.front(), v);
  }
  bounds.pad(0.06);

  SvgCanvas canvas(bounds, "Adaptive gain evolution", "t", "gain value");
  for (int i = 0; i < n_agents; ++i) {
    const std::string color = kPalette[i % 8];
    canvas.polyline(t, gammas[i], color, 1.6);
    canvas.polyline(t, alphas[i], color, 1.6, true);
    canvas.legend_entry(2 * i, color, "gamma " + std::to_string(i + 1));
    canvas.legend_entry(2 * i + 1, color, "alpha " + std::to_string(i + 1) + " (dashed)");
  }
  return canvas.finish();
}

std::string render_projection_errors(const CsvTable& metrics, int n_agents) {
  const std::vector<double> t = table_column(metrics, "t");
  Bounds bounds{t.front(), t.back(), 0.0, 0.0};
  std::vector<std::vector<double>> errors(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    errors[i] = table_column(metrics, "proj_err" + std::to_string(i + 1));
    for (double v : errors[i]) bounds.grow(t.front(), v);
  }
  bounds.pad(0.06);

  SvgCanvas canvas(bounds, "Projection errors |corrupted - exact|", "t", "error magnitude");
  for (int i = 0; i < n_agents; ++i) {
    const std::string color = kPalette[i % 8];
    canvas.polyline(t, errors[i], color, 1.4);
    canvas.legend_entry(i, color, "agent " + std::to_string(i + 1));
  }
  return canvas.finish();
}

RunManifest write_artifacts(const RunResult& result, const ScenarioConfig& cfg,
                            const RunOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir);
  const auto path = [&](const std::string& name) {
    return (fs::path(options.out_dir) / name).string();
  };

  RunManifest manifest;
  manifest.scenario = options.scenario_label.empty() ? cfg.name : options.scenario_label;
  manifest.out_dir = options.out_dir;
  manifest.seed = cfg.seed;

  const CsvTable states = state_table(result.traj);
  const CsvTable metrics = metric_table(result.traj, options.audit_csv);

  write_file(path("trajectory.csv"), csv_to_string(states));
  manifest.artifacts.push_back("trajectory.csv");
  write_file(path("metrics.csv"), csv_to_string(metrics));
  manifest.artifacts.push_back("metrics.csv");
  write_file(path("report.json"), report_json(result, cfg));
  manifest.artifacts.push_back("report.json");

  if (result.traj.n_samples() > 0 && cfg.dim >= 2) {
    write_file(path("fig1.svg"), render_phase_portrait(states, cfg));
    manifest.artifacts.push_back("fig1.svg");
  }
  if (result.traj.n_samples() > 0) {
    write_file(path("fig2.svg"), render_gain_traces(states, cfg.graph.n_agents));
    manifest.artifacts.push_back("fig2.svg");
    if (options.audit_csv) {
      const std::string fig_name =
          cfg.corruption.zeta_alpha_cap <= 1.0 ? "fig3.svg" : "fig4.svg";
      write_file(path(fig_name), render_projection_errors(metrics, cfg.graph.n_agents));
      manifest.artifacts.push_back(fig_name);
    }
  }

  nlohmann::json doc;
  doc["scenario"] = manifest.scenario;
  doc["out_dir"] = manifest.out_dir;
  doc["artifacts"] = manifest.artifacts;
  doc["seed"] = manifest.seed;
  doc["tool_version"] = manifest.tool_version;
  write_file(path("run_manifest.json"), doc.dump(2) + "\n");
  manifest.artifacts.push_back("run_manifest.json");
  return manifest;
}

// ---------------------------------------------------------------------------
// sweeps

ScenarioConfig apply_override(ScenarioConfig cfg, const std::string& key, double value) {
  if (key == "epsilon") cfg.epsilon = value;
  else if (key == "k_gamma") cfg.k_gamma = value;
  else if (key == "k_alpha") cfg.k_alpha = value;
  else if (key == "dt") cfg.dt = value;
  else if (key == "horizon") cfg.horizon = value;
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(value);
  else if (key == "zeta_rule") cfg.corruption.zeta_alpha_cap = value;
  else if (key == "p_bar") cfg.corruption.p_bar = value;
  else throw std::invalid_argument("sweep: unsupported override key '" + key + "'");
  return cfg;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepGrid& grid) {
  if (grid.values.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<std::string> keys;
  std::size_t total = 1;
  for (const auto& [key, values] : grid.values) {  // std::map iterates in sorted key order
    if (values.empty()) throw std::invalid_argument("sweep: empty value list for '" + key + "'");
    keys.push_back(key);
    total *= values.size();
  }

  std::vector<SweepRow> rows;
  rows.reserve(total);
  std::vector<std::size_t> odometer(keys.size(), 0);
  for (std::size_t index = 0; index < total; ++index) {
    SweepRow row;
    ScenarioConfig cfg = base;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const double value = grid.values.at(keys[k])[odometer[k]];
      row.point[keys[k]] = value;
      cfg = apply_override(std::move(cfg), keys[k], value);
    }
    try {
      RunResult result = run_scenario(cfg);
      row.status = result.traj.aborted() ? result.traj.abort_reason : "ok";
      row.precision = result.precision;
      row.gain_ball = result.gain_ball;
    } catch (const std::exception& err) {
      row.status = err.what();
    }
    rows.push_back(std::move(row));

    for (std::size_t k = keys.size(); k-- > 0;) {  // last key fastest
      if (++odometer[k] < grid.values.at(keys[k]).size()) break;
      odometer[k] = 0;
    }
  }
  return rows;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable table;
  if (rows.empty()) return table;
  for (const auto& [key, value] : rows.front().point) table.header.push_back(key);
  table.header.insert(table.header.end(), {"ok", "sync_ok", "opt_ok", "gains_bounded", "t_sync",
                                           "t_opt", "gain_ball_ok", "d_e_gamma", "d_e_alpha"});
  for (const auto& row : rows) {
    std::vector<double> values;
    for (const auto& [key, value] : row.point) values.push_back(value);
    values.push_back(row.status == "ok" ? 1.0 : 0.0);
    values.push_back(row.precision.sync_ok ? 1.0 : 0.0);
    values.push_back(row.precision.opt_ok ? 1.0 : 0.0);
    values.push_back(row.precision.gains_bounded ? 1.0 : 0.0);
    values.push_back(row.precision.t_sync);
    values.push_back(row.precision.t_opt);
    values.push_back(row.gain_ball.all_ok() ? 1.0 : 0.0);
    values.push_back(row.gain_ball.d_e_gamma);
    values.push_back(row.gain_ball.d_e_alpha);
    table.rows.push_back(std::move(values));
  }
  return table;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("sweep: cannot open grid file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error("sweep: parse error in " + path + ": " + err.what());
  }

  SweepSpec spec;
  if (doc.contains("builtin")) {
    spec.base = builtin_scenario(doc.at("builtin").get<std::string>());
  } else if (doc.contains("scenario")) {
    spec.base = load_scenario(doc.at("scenario").get<std::string>());
  } else {
    throw std::runtime_error("sweep: grid file must name a 'builtin' or 'scenario' base");
  }
  if (!doc.contains("grid") || !doc.at("grid").is_object()) {
    throw std::runtime_error("sweep: grid file must carry a 'grid' object");
  }
  for (const auto& [key, values] : doc.at("grid").items()) {
    std::vector<double> list;
    for (const auto& v : values) list.push_back(v.get<double>());
    spec.grid.values[key] = std::move(list);
  }
  return spec;
}

}  // namespace apc
