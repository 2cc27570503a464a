#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "apc/sets.hpp"

namespace apc {

enum class ProjectionMode { exact, synthetic, iterative };

/// Where the worst-case error direction p_i(x) points in synthetic mode.
enum class ErrorDirection {
  fixed_unit,            // p = p_bar * e_1
  seeded_random_unit,    // p = p_bar * (random unit vector)
  adversarial_outward,   // p = p_bar * (x - proj) / |x - proj|, zero on the set
};

/// Precision cap: zeta_i stays in (0, 1) regardless of the zeta rule.
inline constexpr double kZetaMax = 0.99;

struct ZetaRuleViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Corrupted-projection policy. The projection returned to the dynamics is
/// proj(x) + zeta_i * p_i(x) with |p_i| <= p_bar, where zeta_i either comes
/// from `fixed_zeta` (checked against alpha_i * zeta_i <= zeta_alpha_cap on
/// every call) or is recomputed per call as
/// min(kZetaMax, zeta_alpha_cap / max(alpha_i, 1)).
struct CorruptionPolicy {
  ProjectionMode mode = ProjectionMode::exact;
  double p_bar = 0.0;
  ErrorDirection direction = ErrorDirection::seeded_random_unit;
  double zeta_alpha_cap = 1.0;  // C in the rule alpha_i * zeta_i <= C
  std::optional<Eigen::VectorXd> fixed_zeta;
};

void validate_policy(const CorruptionPolicy& policy, int n_agents);

/// Precision used for agent `agent` at descent gain `alpha_i`. Throws
/// ZetaRuleViolation when a fixed zeta breaks the active rule.
double resolve_zeta(const CorruptionPolicy& policy, double alpha_i, int agent);

/// Deterministic small PRNG for error directions; one substream per
/// integration step keeps Euler runs bitwise reproducible.
class ErrorRng {
 public:
  explicit ErrorRng(std::uint64_t seed) : state_(seed) {}

  /// Substream for integration step `step` of a run seeded with `seed`.
  static ErrorRng substream(std::uint64_t seed, std::uint64_t step);

  std::uint64_t next_u64();
  double next_uniform01();                 // in (0, 1)
  Eigen::VectorXd next_unit_vector(int n); // Gaussian direction, normalized

 private:
  std::uint64_t state_;
};

struct CorruptionResult {
  Eigen::VectorXd corrupted;  // what the dynamics consume
  Eigen::VectorXd exact;      // reference projection (audit channel)
  double zeta = 0.0;
  int sweeps = 0;             // Dykstra sweeps spent in iterative mode
};

/// Corrupted estimate of the projection of x onto s:
///  - exact:     the true projection, no error;
///  - synthetic: proj(x) + zeta * p(x) with the configured direction source;
///  - iterative: truncated Dykstra, stopped once its gap to a high-accuracy
///               reference falls below zeta * p_bar (sweep count reported).
CorruptionResult corrupted_project(const IntersectionSet& s, const Eigen::VectorXd& x,
                                   const CorruptionPolicy& policy, double alpha_i, int agent,
                                   ErrorRng& rng, double exact_tol = 1e-10);

/// Per-sample audit of the corruption actually injected by the dynamics:
/// error(k, i) = |corrupted - exact| for agent i at sample k; sweeps(k, i)
/// is the iterative-mode cost (0 otherwise).
struct ProjectionAudit {
  bool enabled = false;
  Eigen::MatrixXd error;
  Eigen::MatrixXi sweeps;
};

/// The recorded per-agent error series (rows = samples, cols = agents).
/// Throws std::runtime_error when the audit channel was not recorded.
const Eigen::MatrixXd& projection_error_series(const ProjectionAudit& audit);

}  // namespace apc
