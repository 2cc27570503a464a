#pragma once

#include <string>
#include <vector>

#include "apc/dynamics.hpp"

namespace apc {

/// Parses and fully validates a scenario file (JSON, keys mirroring
/// ScenarioConfig). Numeric fields accept plain numbers or rational
/// strings like "3/25". Throws std::runtime_error with file/line context
/// on parse errors and std::invalid_argument / std::runtime_error naming
/// the violated invariant on validation errors.
ScenarioConfig load_scenario(const std::string& path);

/// Same, from an already-parsed JSON text (used by tests and the sweep
/// grid loader).
ScenarioConfig scenario_from_json_text(const std::string& text, const std::string& origin);

/// Built-in scenarios: "paper-sec5" (the three-agent ellipse-intersection
/// experiment with adaptive gains) and "unit-disk" (single agent descending
/// onto the unit disk with frozen unit gains). Throws std::invalid_argument
/// for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace apc
