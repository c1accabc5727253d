#include "e2r/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace e2r {

CoverageGrid::CoverageGrid(Vec2 lo_corner, Vec2 hi_corner, double cell_size)
    : lo(lo_corner), hi(hi_corner), cell(cell_size) {
  if (cell <= 0.0) throw std::invalid_argument("cell size must be positive");
  if (hi.x <= lo.x || hi.y <= lo.y) throw std::invalid_argument("empty coverage box");
  nx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell - 1e-9)));
  ny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell - 1e-9)));
  occupied.assign(static_cast<std::size_t>(nx) * ny, false);
}

void CoverageGrid::mark(Vec2 p) {
  int ix = static_cast<int>(std::floor((p.x - lo.x) / cell));
  int iy = static_cast<int>(std::floor((p.y - lo.y) / cell));
  if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) ++clamped;
  ix = std::clamp(ix, 0, nx - 1);
  iy = std::clamp(iy, 0, ny - 1);
  occupied[static_cast<std::size_t>(iy) * nx + ix] = true;
}

void CoverageGrid::mark_trajectory(const Trajectory& traj) {
  for (const TrajectoryStep& st : traj.steps) mark(st.ee_pos);
}

double CoverageGrid::ratio() const {
  const long long total = cells();
  if (total == 0) return 0.0;
  const long long on = std::count(occupied.begin(), occupied.end(), true);
  return static_cast<double>(on) / static_cast<double>(total);
}

CoverageGrid workspace_grid(const EnvConfig& env) {
  const double r = env.reach();
  const Vec2 lo{env.base.x - r, env.base.y - r};
  const Vec2 hi{env.base.x + r, env.base.y + r};
  return CoverageGrid(lo, hi, env.coverage_cell);
}

SurfaceDiscretization::SurfaceDiscretization(const ObjectConfig& obj, const Pose& initial_pose,
                                             double target_len)
    : object(obj), pose(initial_pose) {
  if (target_len <= 0.0) throw std::invalid_argument("segment length must be positive");
  double perimeter;
  if (object.shape == ShapeKind::Circle) {
    perimeter = 2.0 * kPi * object.radius;
  } else {
    perimeter = 4.0 * (object.half_extents.x + object.half_extents.y);
  }
  segments = std::max(1, static_cast<int>(std::lround(perimeter / target_len)));
  hit.assign(segments, false);
}

int SurfaceDiscretization::locate(Vec2 world_point) const {
  const Vec2 local = (world_point - pose.pos).rotated(-pose.angle);
  if (object.shape == ShapeKind::Circle) {
    double phi = std::atan2(local.y, local.x);
    if (phi < 0.0) phi += 2.0 * kPi;
    const int idx = static_cast<int>(phi / (2.0 * kPi) * segments);
    return std::clamp(idx, 0, segments - 1);
  }
  // Walk the rectangle boundary counterclockwise from the bottom-left corner
  // and index by arclength of the nearest boundary point.
  const double hx = object.half_extents.x;
  const double hy = object.half_extents.y;
  const double cx = std::clamp(local.x, -hx, hx);
  const double cy = std::clamp(local.y, -hy, hy);
  // Push interior points to the nearest side.
  const std::array<double, 4> side_dist{hy + cy, hx - cx, hy - cy, hx + cx};  // bottom,right,top,left
  const int side = static_cast<int>(
      std::min_element(side_dist.begin(), side_dist.end()) - side_dist.begin());
  double s = 0.0;
  switch (side) {
    case 0: s = cx + hx; break;                                  // bottom, left to right
    case 1: s = 2.0 * hx + (cy + hy); break;                     // right, bottom to top
    case 2: s = 2.0 * hx + 2.0 * hy + (hx - cx); break;          // top, right to left
    default: s = 4.0 * hx + 2.0 * hy + (hy - cy); break;         // left, top to bottom
  }
  const double perimeter = 4.0 * (hx + hy);
  const int idx = static_cast<int>(s / perimeter * segments);
  return std::clamp(idx, 0, segments - 1);
}

void SurfaceDiscretization::mark(Vec2 world_point) { hit[locate(world_point)] = true; }

double SurfaceDiscretization::ratio() const {
  if (segments == 0) return 0.0;
  const long long on = std::count(hit.begin(), hit.end(), true);
  return static_cast<double>(on) / static_cast<double>(segments);
}

SurfaceDiscretization object_surface(const EnvConfig& env) {
  return SurfaceDiscretization(env.object, env.object.initial_pose(), env.surface_cell);
}

double approach_coverage(const std::vector<Trajectory>& successes, CoverageGrid grid) {
  for (const Trajectory& tr : successes) grid.mark_trajectory(tr);
  return grid.ratio();
}

double grasp_coverage(const std::vector<Trajectory>& successes, SurfaceDiscretization surface) {
  for (const Trajectory& tr : successes) {
    if (!tr.first_contact) {
      throw std::runtime_error("successful trajectory lacks a first-contact point");
    }
    surface.mark(*tr.first_contact);
  }
  return surface.ratio();
}

namespace {

Stat stat_of(const std::vector<double>& values) {
  Stat st;
  const std::size_t n = values.size();
  if (n == 0) return st;
  double sum = 0.0;
  for (double v : values) sum += v;
  st.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double sq = 0.0;
    for (double v : values) sq += (v - st.mean) * (v - st.mean);
    const double sd = std::sqrt(sq / static_cast<double>(n - 1));
    st.ci_halfwidth = 1.96 * sd / std::sqrt(static_cast<double>(n));
  }
  return st;
}

}  // namespace

AggregateSummary aggregate_runs(const std::vector<std::vector<GenerationLog>>& per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("need at least one run to aggregate");
  AggregateSummary summary;
  summary.seeds = static_cast<int>(per_seed.size());

  std::set<long long> checkpoint_set;
  for (const auto& logs : per_seed) {
    for (const GenerationLog& log : logs) checkpoint_set.insert(log.rollouts);
  }
  int succeeded = 0;
  for (const auto& logs : per_seed) {
    if (!logs.empty() && logs.back().successes_total > 0) ++succeeded;
  }
  summary.success_rate = static_cast<double>(succeeded) / static_cast<double>(summary.seeds);

  for (long long cp : checkpoint_set) {
    CheckpointStats stats;
    stats.rollouts = cp;
    std::vector<double> successes, approach, grasp;
    for (const auto& logs : per_seed) {
      // Step function: the last generation at or before this checkpoint.
      const GenerationLog* latest = nullptr;
      for (const GenerationLog& log : logs) {
        if (log.rollouts <= cp) latest = &log;
        else break;
      }
      successes.push_back(latest ? static_cast<double>(latest->successes_total) : 0.0);
      approach.push_back(latest ? latest->approach_coverage : 0.0);
      grasp.push_back(latest ? latest->grasp_coverage : 0.0);
    }
    stats.successes = stat_of(successes);
    stats.approach = stat_of(approach);
    stats.grasp = stat_of(grasp);
    summary.points.push_back(stats);
  }
  return summary;
}

}  // namespace e2r
