#include "apc/corruption.hpp"

#include <cmath>
#include <string>

namespace apc {

namespace {

// splitmix64; full 64-bit avalanche per draw.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ErrorRng ErrorRng::substream(std::uint64_t seed, std::uint64_t step) {
  return ErrorRng(mix(seed ^ mix(step + 1)));
}

std::uint64_t ErrorRng::next_u64() {
  state_ = mix(state_);
  return state_;
}

double ErrorRng::next_uniform01() {
  // 53-bit mantissa, strictly inside (0, 1)
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

Eigen::VectorXd ErrorRng::next_unit_vector(int n) {
  Eigen::VectorXd v(n);
  int k = 0;
  while (k < n) {
    // Box-Muller, hand-rolled so the stream does not depend on libstdc++
    const double u1 = next_uniform01();
    const double u2 = next_uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    v(k++) = r * std::cos(2.0 * M_PI * u2);
    if (k < n) v(k++) = r * std::sin(2.0 * M_PI * u2);
  }
  const double norm = v.norm();
  if (norm < 1e-12) return next_unit_vector(n);
  return v / norm;
}

void validate_policy(const CorruptionPolicy& policy, int n_agents) {
  if (policy.mode != ProjectionMode::exact && !(policy.p_bar >= 0.0)) {
    throw std::invalid_argument("corruption: p_bar must be nonnegative");
  }
  if (!(policy.zeta_alpha_cap > 0.0)) {
    throw std::invalid_argument("corruption: zeta rule bound must be positive");
  }
  if (policy.fixed_zeta) {
    if (policy.fixed_zeta->size() != n_agents) {
      throw std::invalid_argument("corruption: fixed zeta must have one entry per agent");
    }
    for (int i = 0; i < n_agents; ++i) {
      const double z = (*policy.fixed_zeta)(i);
      if (!(z > 0.0 && z < 1.0)) {
        throw std::invalid_argument("corruption: fixed zeta entries must lie in (0, 1)");
      }
    }
  }
}

double resolve_zeta(const CorruptionPolicy& policy, double alpha_i, int agent) {
  if (policy.fixed_zeta) {
    const double zeta = (*policy.fixed_zeta)(agent);
    if (zeta * alpha_i > policy.zeta_alpha_cap * (1.0 + 1e-12)) {
      throw ZetaRuleViolation(
          "zeta rule violated for agent " + std::to_string(agent + 1) + ": alpha * zeta = " +
          std::to_string(zeta * alpha_i) + " exceeds " + std::to_string(policy.zeta_alpha_cap));
    }
    return zeta;
  }
  return std::min(kZetaMax, policy.zeta_alpha_cap / std::max(alpha_i, 1.0));
}

CorruptionResult corrupted_project(const IntersectionSet& s, const Eigen::VectorXd& x,
                                   const CorruptionPolicy& policy, double alpha_i, int agent,
                                   ErrorRng& rng, double exact_tol) {
  CorruptionResult out;
  out.exact = project_intersection(s, x, exact_tol);
  if (policy.mode == ProjectionMode::exact) {
    out.corrupted = out.exact;
    return out;
  }

  out.zeta = resolve_zeta(policy, alpha_i, agent);

  if (policy.mode == ProjectionMode::synthetic) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(x.size());
    switch (policy.direction) {
      case ErrorDirection::fixed_unit:
        p(0) = policy.p_bar;
        break;
      case ErrorDirection::seeded_random_unit:
        p = policy.p_bar * rng.next_unit_vector(static_cast<int>(x.size()));
        break;
      case ErrorDirection::adversarial_outward: {
        const Eigen::VectorXd gap = x - out.exact;
        const double norm = gap.norm();
        if (norm > 1e-12) p = (policy.p_bar / norm) * gap;
        break;
      }
    }
    out.corrupted = out.exact + out.zeta * p;
    return out;
  }

  // Iterative mode: run Dykstra until the realized gap fits the budget
  // zeta * p_bar; the sweep count exposes the precision/cost trade-off.
  const double budget = out.zeta * policy.p_bar;
  if ((x - out.exact).norm() <= budget) {
    out.corrupted = x;  // zero sweeps already meet the budget
    return out;
  }
  Eigen::VectorXd y = x;
  std::vector<Eigen::VectorXd> corrections(s.members.size(), Eigen::VectorXd::Zero(x.size()));
  const int max_sweeps = 200000;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t m = 0; m < s.members.size(); ++m) {
      const Eigen::VectorXd w = y + corrections[m];
      y = project_member(s.members[m], w);
      corrections[m] = w - y;
    }
    if ((y - out.exact).norm() <= budget) {
      out.corrupted = y;
      out.sweeps = sweep;
      return out;
    }
  }
  throw std::runtime_error("corrupted_project: iterative mode failed to reach its error budget");
}

const Eigen::MatrixXd& projection_error_series(const ProjectionAudit& audit) {
  if (!audit.enabled) {
    throw std::runtime_error("projection_error_series: audit channel was not recorded");
  }
  return audit.error;
}

}  // namespace apc
