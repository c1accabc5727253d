#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "e2r/model.hpp"

namespace e2r {

struct GripperConfig {
  double max_opening = 0.12;
  double finger_length = 0.06;
  double closure_speed = 0.006;  // opening decrement per closing step
};

enum class ShapeKind { Circle, Box };

struct ObjectConfig {
  ShapeKind shape = ShapeKind::Circle;
  double radius = 0.04;           // circle
  Vec2 half_extents{0.03, 0.02};  // box
  double x = 0.5;                 // initial center x; y follows from resting on the table

  double resting_y() const { return shape == ShapeKind::Circle ? radius : half_extents.y; }
  Vec2 initial_position() const { return {x, resting_y()}; }
  Pose initial_pose() const { return {initial_position(), 0.0}; }
};

struct EnvConfig {
  int episode_steps = 200;
  std::vector<double> link_lengths{0.4, 0.3, 0.2};
  std::vector<std::array<double, 2>> joint_limits{{{-kPi, kPi}}, {{-kPi, kPi}}, {{-kPi, kPi}}};
  Vec2 base{0.0, 0.25};
  std::vector<double> rest_config{kPi / 2.0, 0.0, 0.0};
  GripperConfig gripper;
  ObjectConfig object;
  double contact_tol = 1e-3;
  double friction = 0.5;
  double lift_height = 0.1;
  double coverage_cell = 0.02;
  double surface_cell = 0.01;

  int joints() const { return static_cast<int>(link_lengths.size()); }
  int genome_length() const { return 3 * joints() + 1; }
  double reach() const;
};

struct RunConfig {
  int mu = 100;
  int lambda = 50;
  long long budget_rollouts = 20000;
  double p_explore = 0.5;
  double p_refine = 0.5;
  int impatience_period = 500;   // generations between restarts while no success exists
  int regenerate_period = 10;    // generations between success-archive reinjections
  int archive_additions = 10;    // descriptors appended to the novelty archive per generation
  int k_neighbors = 15;
  std::uint64_t seed = 1;
  double sigma_big = 0.3;
  double sigma_small = 0.01;
  double sigma_uniform = 0.1;
  bool impatience_clears_archive = true;
  EnvConfig env;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Collects every violated constraint instead of stopping at the first.
ValidationReport validate_config(const RunConfig& cfg);

}  // namespace e2r
