#pragma once

#include <optional>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/model.hpp"

namespace e2r {

// Occupancy grid over a fixed box. Points outside are clamped to the border
// cells and counted so callers can surface a warning.
struct CoverageGrid {
  Vec2 lo{};
  Vec2 hi{};
  double cell = 0.02;
  int nx = 0;
  int ny = 0;
  std::vector<bool> occupied;
  long long clamped = 0;

  CoverageGrid(Vec2 lo_corner, Vec2 hi_corner, double cell_size);

  void mark(Vec2 p);
  void mark_trajectory(const Trajectory& traj);  // every end-effector position
  long long cells() const { return static_cast<long long>(nx) * ny; }
  double ratio() const;
};

// Grid spanning the arm's reachable box.
CoverageGrid workspace_grid(const EnvConfig& env);

// Object boundary split into segments of roughly target length, anchored at the
// object's initial pose (where every first contact happens).
struct SurfaceDiscretization {
  ObjectConfig object;
  Pose pose;
  int segments = 0;
  std::vector<bool> hit;

  SurfaceDiscretization(const ObjectConfig& obj, const Pose& initial_pose, double target_len);

  int locate(Vec2 world_point) const;
  void mark(Vec2 world_point);
  double ratio() const;
};

SurfaceDiscretization object_surface(const EnvConfig& env);

// Fraction of grid cells visited by the end effector across the given
// trajectories. Callers pass successful trajectories only.
double approach_coverage(const std::vector<Trajectory>& successes, CoverageGrid grid);

// Fraction of boundary segments holding at least one first-contact point.
// Throws when a trajectory lacks one.
double grasp_coverage(const std::vector<Trajectory>& successes, SurfaceDiscretization surface);

struct Stat {
  double mean = 0.0;
  std::optional<double> ci_halfwidth;  // absent below two seeds
};

struct CheckpointStats {
  long long rollouts = 0;
  Stat successes;
  Stat approach;
  Stat grasp;
};

struct AggregateSummary {
  int seeds = 0;
  double success_rate = 0.0;  // fraction of seeds that ended with at least one success
  std::vector<CheckpointStats> points;
};

// Aligns per-seed generation logs on the union of cumulative-rollout
// checkpoints (carrying the last known value forward) and reports the mean with
// a 1.96*sd/sqrt(n) normal-approximation confidence half-width.
AggregateSummary aggregate_runs(const std::vector<std::vector<GenerationLog>>& per_seed);

}  // namespace e2r
