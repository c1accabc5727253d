#include "e2r/config.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace e2r {

double EnvConfig::reach() const {
  return std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0);
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

ValidationReport validate_config(const RunConfig& cfg) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.violations.push_back("violated: " + msg); };

  if (cfg.lambda < 1) fail("lambda ≥ 1");
  if (cfg.mu < cfg.lambda) fail("mu ≥ lambda");
  if (cfg.k_neighbors < 1) fail("k ≥ 1");
  if (cfg.p_explore < 0.0 || cfg.p_explore > 1.0) fail("p_e ∈ [0, 1]");
  if (cfg.p_refine < 0.0 || cfg.p_refine > 1.0) fail("p_r ∈ [0, 1]");
  if (std::fabs(cfg.p_explore + cfg.p_refine - 1.0) > 1e-9) fail("p_e + p_r = 1");
  if (cfg.impatience_period <= 0) fail("G_I > 0");
  if (cfg.regenerate_period <= 0) fail("G_R > 0");
  if (cfg.archive_additions < 0) fail("n_a ≥ 0");
  if (cfg.archive_additions > cfg.lambda) fail("n_a ≤ lambda");
  if (cfg.budget_rollouts < 1) fail("budget ≥ 1");
  if (cfg.sigma_big <= 0.0) fail("sigma_big > 0");
  if (cfg.sigma_small < 0.0 || cfg.sigma_small >= cfg.sigma_big) fail("0 ≤ sigma_small < sigma_big");
  if (cfg.sigma_uniform <= 0.0) fail("sigma_uniform > 0");

  const EnvConfig& env = cfg.env;
  if (env.episode_steps < 2) fail("env: T ≥ 2");
  if (env.link_lengths.empty()) fail("env: at least one link");
  for (double l : env.link_lengths) {
    if (l <= 0.0) {
      fail("env: link lengths positive");
      break;
    }
  }
  if (env.joint_limits.size() != env.link_lengths.size()) {
    fail("env: one joint limit pair per link");
  } else {
    for (const auto& lim : env.joint_limits) {
      if (lim[0] >= lim[1]) {
        fail("env: joint limit min < max");
        break;
      }
    }
  }
  if (env.rest_config.size() != env.link_lengths.size()) fail("env: rest config has one angle per joint");
  if (env.gripper.max_opening <= 0.0) fail("env: gripper max opening positive");
  if (env.gripper.finger_length <= 0.0) fail("env: finger length positive");
  if (env.gripper.closure_speed <= 0.0) fail("env: closure speed positive");
  if (env.object.shape == ShapeKind::Circle && env.object.radius <= 0.0) fail("env: object radius positive");
  if (env.object.shape == ShapeKind::Box &&
      (env.object.half_extents.x <= 0.0 || env.object.half_extents.y <= 0.0)) {
    fail("env: object half extents positive");
  }
  if (env.contact_tol <= 0.0) fail("env: contact tolerance positive");
  if (env.friction < 0.0) fail("env: friction ≥ 0");
  if (env.lift_height <= 0.0) fail("env: lift height positive");
  if (env.coverage_cell <= 0.0) fail("env: coverage cell positive");
  if (env.surface_cell <= 0.0) fail("env: surface cell positive");
  return report;
}

}  // namespace e2r
