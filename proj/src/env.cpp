#include "e2r/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace e2r {

DecodedGenome decode_genome(const Genome& g, const EnvConfig& env) {
  if (static_cast<int>(g.size()) != env.genome_length()) {
    throw std::invalid_argument("genome length " + std::to_string(g.size()) +
                                " does not fit an arm with " + std::to_string(env.joints()) +
                                " joints");
  }
  const int joints = env.joints();
  DecodedGenome dec;
  dec.waypoints.assign(3, std::vector<double>(joints));
  for (int w = 0; w < 3; ++w) {
    for (int j = 0; j < joints; ++j) {
      const auto& lim = env.joint_limits[j];
      const double gene = std::clamp(g[w * joints + j], -1.0, 1.0);
      dec.waypoints[w][j] = lim[0] + (gene + 1.0) / 2.0 * (lim[1] - lim[0]);
    }
  }
  const double cg = std::clamp(g[3 * joints], -1.0, 1.0);
  const double horizon = 0.9 * env.episode_steps;
  const int cap = static_cast<int>(std::floor(horizon));
  dec.close_step = std::clamp(static_cast<int>(std::lround((cg + 1.0) / 2.0 * horizon)), 0, cap);
  return dec;
}

CubicTrajectory::CubicTrajectory(const std::vector<double>& q0,
                                 const std::vector<std::vector<double>>& waypoints,
                                 int episode_steps) {
  if (episode_steps < 2) throw std::invalid_argument("episode_steps must be >= 2");
  if (waypoints.size() != 3) throw std::invalid_argument("expected exactly three waypoints");
  const std::size_t joints = q0.size();
  for (const auto& w : waypoints) {
    if (w.size() != joints) throw std::invalid_argument("waypoint joint count mismatch");
  }
  const double T = static_cast<double>(episode_steps);
  nodes_ = {0.0, T / 3.0, 2.0 * T / 3.0, T};
  values_.resize(joints);
  for (std::size_t j = 0; j < joints; ++j) {
    values_[j] = {q0[j], waypoints[0][j], waypoints[1][j], waypoints[2][j]};
  }
}

std::vector<double> CubicTrajectory::eval(double t) const {
  std::array<double, 4> basis{};
  for (int i = 0; i < 4; ++i) {
    double l = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) l *= (t - nodes_[j]) / (nodes_[i] - nodes_[j]);
    }
    basis[i] = l;
  }
  std::vector<double> out(values_.size());
  for (std::size_t j = 0; j < values_.size(); ++j) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) v += values_[j][i] * basis[i];
    out[j] = v;
  }
  return out;
}

std::vector<double> CubicTrajectory::setpoint(
    double t, const std::vector<std::array<double, 2>>& limits) const {
  std::vector<double> q = eval(t);
  if (limits.size() != q.size()) throw std::invalid_argument("joint limit count mismatch");
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = std::clamp(q[j], limits[j][0], limits[j][1]);
  return q;
}

CubicTrajectory interpolate(const std::vector<double>& q0,
                            const std::vector<std::vector<double>>& waypoints,
                            int episode_steps) {
  return CubicTrajectory(q0, waypoints, episode_steps);
}

Pose forward_kinematics(const std::vector<double>& q, const EnvConfig& env) {
  if (q.size() != env.link_lengths.size()) {
    throw std::invalid_argument("joint configuration does not match the link count");
  }
  Vec2 p = env.base;
  double angle = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    angle += q[j];
    p = p + env.link_lengths[j] * Vec2{std::cos(angle), std::sin(angle)};
  }
  return {p, wrap_angle(angle)};
}

std::vector<Vec2> chain_points(const std::vector<double>& q, const EnvConfig& env) {
  if (q.size() != env.link_lengths.size()) {
    throw std::invalid_argument("joint configuration does not match the link count");
  }
  std::vector<Vec2> pts;
  pts.reserve(q.size() + 1);
  Vec2 p = env.base;
  pts.push_back(p);
  double angle = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    angle += q[j];
    p = p + env.link_lengths[j] * Vec2{std::cos(angle), std::sin(angle)};
    pts.push_back(p);
  }
  return pts;
}

std::optional<std::vector<double>> inverse_kinematics(const Pose& tip, const EnvConfig& env,
                                                      bool elbow_up) {
  if (env.joints() != 3) return std::nullopt;
  const double l1 = env.link_lengths[0];
  const double l2 = env.link_lengths[1];
  const double l3 = env.link_lengths[2];
  const Vec2 w = tip.pos - env.base - l3 * Vec2{std::cos(tip.angle), std::sin(tip.angle)};
  const double c2 = (w.dot(w) - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c2 < -1.0 || c2 > 1.0) return std::nullopt;
  double q2 = std::acos(std::clamp(c2, -1.0, 1.0));
  if (elbow_up) q2 = -q2;
  const double q1 =
      std::atan2(w.y, w.x) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  std::vector<double> q{wrap_angle(q1), wrap_angle(q2), 0.0};
  q[2] = wrap_angle(tip.angle - q[0] - q[1]);
  for (int j = 0; j < 3; ++j) {
    if (q[j] < env.joint_limits[j][0] || q[j] > env.joint_limits[j][1]) return std::nullopt;
  }
  return q;
}

GripperGeometry gripper_segments(const Pose& ee, double opening, const GripperConfig& gripper) {
  const Vec2 dir{std::cos(ee.angle), std::sin(ee.angle)};
  const Vec2 lat = dir.perp();
  const Vec2 base_plus = ee.pos + (opening / 2.0) * lat;
  const Vec2 base_minus = ee.pos - (opening / 2.0) * lat;
  return {{base_plus, base_plus + gripper.finger_length * dir},
          {base_minus, base_minus + gripper.finger_length * dir},
          {base_minus, base_plus}};
}

namespace {

Vec2 closest_point_on_segment(const Segment& s, Vec2 p) {
  const Vec2 d = s.b - s.a;
  const double len2 = d.dot(d);
  if (len2 <= 0.0) return s.a;
  const double t = std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0);
  return s.a + t * d;
}

double seg_seg_closest(const Segment& s1, const Segment& s2, Vec2& c1, Vec2& c2) {
  constexpr double eps = 1e-15;
  const Vec2 d1 = s1.b - s1.a;
  const Vec2 d2 = s2.b - s2.a;
  const Vec2 r = s1.a - s2.a;
  const double a = d1.dot(d1);
  const double e = d2.dot(d2);
  const double f = d2.dot(r);
  double s, t;
  if (a <= eps && e <= eps) {
    s = t = 0.0;
  } else if (a <= eps) {
    s = 0.0;
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      t = 0.0;
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  c1 = s1.a + s * d1;
  c2 = s2.a + t * d2;
  return distance(c1, c2);
}

SurfaceProbe probe_circle(const Segment& s, Vec2 center, double radius) {
  const Vec2 p = closest_point_on_segment(s, center);
  const double d = distance(p, center);
  const Vec2 n = d > 1e-12 ? (1.0 / d) * (p - center) : Vec2{0.0, 1.0};
  return {center + radius * n, n, d - radius};
}

SurfaceProbe probe_box(const Segment& world, Vec2 center, double angle, Vec2 half) {
  const Segment s{(world.a - center).rotated(-angle), (world.b - center).rotated(-angle)};
  const Vec2 d = s.b - s.a;

  // Clip the segment against the rectangle slabs to detect interpenetration.
  double t0 = 0.0, t1 = 1.0;
  bool inside = true;
  for (int axis = 0; axis < 2 && inside; ++axis) {
    const double av = axis == 0 ? s.a.x : s.a.y;
    const double dv = axis == 0 ? d.x : d.y;
    const double h = axis == 0 ? half.x : half.y;
    if (std::fabs(dv) < 1e-15) {
      if (std::fabs(av) > h) inside = false;
    } else {
      double u0 = (-h - av) / dv;
      double u1 = (h - av) / dv;
      if (u0 > u1) std::swap(u0, u1);
      t0 = std::max(t0, u0);
      t1 = std::min(t1, u1);
      if (t0 > t1) inside = false;
    }
  }

  if (inside) {
    // Deepest interior point of the clipped segment; the depth profile is
    // concave piecewise-linear, so a ternary search finds its maximum.
    auto depth_at = [&](double t) {
      const Vec2 p = s.a + t * d;
      return std::min(std::min(half.x - p.x, half.x + p.x),
                      std::min(half.y - p.y, half.y + p.y));
    };
    double lo = t0, hi = t1;
    for (int it = 0; it < 80; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (depth_at(m1) < depth_at(m2)) lo = m1; else hi = m2;
    }
    const double tb = 0.5 * (lo + hi);
    const Vec2 p = s.a + tb * d;
    const double depth = std::max(0.0, depth_at(tb));
    const std::array<double, 4> face_dist{half.x - p.x, half.x + p.x, half.y - p.y, half.y + p.y};
    const int face = static_cast<int>(
        std::min_element(face_dist.begin(), face_dist.end()) - face_dist.begin());
    Vec2 bp, n;
    switch (face) {
      case 0: bp = {half.x, std::clamp(p.y, -half.y, half.y)}; n = {1.0, 0.0}; break;
      case 1: bp = {-half.x, std::clamp(p.y, -half.y, half.y)}; n = {-1.0, 0.0}; break;
      case 2: bp = {std::clamp(p.x, -half.x, half.x), half.y}; n = {0.0, 1.0}; break;
      default: bp = {std::clamp(p.x, -half.x, half.x), -half.y}; n = {0.0, -1.0}; break;
    }
    return {center + bp.rotated(angle), n.rotated(angle), -depth};
  }

  const std::array<Vec2, 4> corners{{{-half.x, -half.y},
                                     {half.x, -half.y},
                                     {half.x, half.y},
                                     {-half.x, half.y}}};
  double best = std::numeric_limits<double>::infinity();
  Vec2 on_seg, on_box;
  for (int e = 0; e < 4; ++e) {
    const Segment edge{corners[e], corners[(e + 1) % 4]};
    Vec2 c1, c2;
    const double dd = seg_seg_closest(s, edge, c1, c2);
    if (dd < best) {
      best = dd;
      on_seg = c1;
      on_box = c2;
    }
  }
  Vec2 n;
  if (best > 1e-12) {
    n = (1.0 / best) * (on_seg - on_box);
  } else {
    n = std::fabs(std::fabs(on_box.x) - half.x) <= std::fabs(std::fabs(on_box.y) - half.y)
            ? Vec2{on_box.x >= 0.0 ? 1.0 : -1.0, 0.0}
            : Vec2{0.0, on_box.y >= 0.0 ? 1.0 : -1.0};
  }
  return {center + on_box.rotated(angle), n.rotated(angle), best};
}

}  // namespace

SurfaceProbe probe_segment(const Segment& s, const ObjectConfig& obj, const Pose& obj_pose) {
  if (obj.shape == ShapeKind::Circle) return probe_circle(s, obj_pose.pos, obj.radius);
  return probe_box(s, obj_pose.pos, obj_pose.angle, obj.half_extents);
}

bool antipodal_check(const SurfaceProbe& c1, const SurfaceProbe& c2, double friction) {
  if (friction < 0.0) throw std::invalid_argument("friction must be non-negative");
  const Vec2 n1 = c1.normal.normalized();
  const Vec2 n2 = c2.normal.normalized();
  const double cos_opposition = std::clamp(n1.dot(-1.0 * n2), -1.0, 1.0);
  return std::acos(cos_opposition) <= 2.0 * std::atan(friction);
}

Pose push_resolve(Pose object, const SurfaceProbe& contact) {
  if (!contact.penetrating()) return object;
  const double push_x = -contact.normal.x;  // inward normal, horizontal component
  if (push_x > 0.0) {
    object.pos.x += contact.depth();
  } else if (push_x < 0.0) {
    object.pos.x -= contact.depth();
  }
  return object;
}

Pose compose(const Pose& frame, const Pose& local) {
  return {frame.pos + local.pos.rotated(frame.angle), wrap_angle(frame.angle + local.angle)};
}

Pose relative_pose(const Pose& frame, const Pose& world) {
  return {(world.pos - frame.pos).rotated(-frame.angle), wrap_angle(world.angle - frame.angle)};
}

Trajectory rollout(const Genome& g, const EnvConfig& env) {
  const int T = env.episode_steps;
  const DecodedGenome dec = decode_genome(g, env);
  const CubicTrajectory plan = interpolate(env.rest_config, dec.waypoints, T);
  const GripperConfig& gr = env.gripper;
  const double tol = env.contact_tol;

  Trajectory tr;
  tr.steps.reserve(T);
  Pose obj = env.object.initial_pose();
  const double lift_target = obj.pos.y + env.lift_height;
  Phase phase = Phase::Approach;
  double opening = gr.max_opening;
  int closing_steps = 0;
  std::vector<double> q_frozen;
  bool grasped = false;
  Pose obj_in_ee{};

  for (int t = 0; t < T; ++t) {
    if (phase == Phase::Approach && t == dec.close_step) {
      phase = Phase::Closing;
      q_frozen = plan.setpoint(static_cast<double>(t), env.joint_limits);
    }
    const std::vector<double> q =
        phase == Phase::Closing ? q_frozen : plan.setpoint(static_cast<double>(t), env.joint_limits);
    const Pose ee = forward_kinematics(q, env);
    const double prev_opening = opening;
    if (phase == Phase::Closing) {
      ++closing_steps;
      opening = std::max(0.0, gr.max_opening - closing_steps * gr.closure_speed);
    }
    if (grasped) obj = compose(ee, obj_in_ee);
    const Phase record_phase = phase;

    const GripperGeometry segs = gripper_segments(ee, opening, gr);
    const std::array<Segment, 3> bodies{segs.finger_plus, segs.finger_minus, segs.palm};
    std::array<SurfaceProbe, 3> probes;
    std::array<bool, 3> contact{};
    for (int b = 0; b < 3; ++b) {
      probes[b] = probe_segment(bodies[b], env.object, obj);
      contact[b] = probes[b].touching(tol);
    }
    if (!tr.t_touch && (contact[0] || contact[1] || contact[2])) {
      tr.t_touch = t;
      for (int b = 0; b < 3; ++b) {
        if (contact[b]) {
          tr.first_contact = probes[b].point;
          break;
        }
      }
    }

    if (!grasped) {
      // Horizontal push resolution; opposing pushes jam the object for this step.
      int push_right = 0, push_left = 0;
      for (int b = 0; b < 3; ++b) {
        if (!probes[b].penetrating()) continue;
        const double px = -probes[b].normal.x;
        if (px > 0.0) ++push_right;
        if (px < 0.0) ++push_left;
      }
      if (!(push_right > 0 && push_left > 0)) {
        for (int b = 0; b < 3; ++b) {
          const SurfaceProbe p = probe_segment(bodies[b], env.object, obj);
          if (p.penetrating()) obj = push_resolve(obj, p);
        }
      }
    }

    if (phase == Phase::Closing && !grasped) {
      auto finger_probes = [&](double w) {
        const GripperGeometry gg = gripper_segments(ee, w, gr);
        return std::pair{probe_segment(gg.finger_plus, env.object, obj),
                         probe_segment(gg.finger_minus, env.object, obj)};
      };
      auto [fp, fm] = finger_probes(opening);
      bool both = fp.touching(tol) && fm.touching(tol);
      if (both || opening <= 0.0) {
        if (both && (fp.penetrating() || fm.penetrating()) && opening < prev_opening) {
          // Partial last step: back off to the widest opening where both fingers
          // still touch, instead of leaving them inside the object.
          auto touching_at = [&](double w) {
            const auto [a, b] = finger_probes(w);
            return a.touching(tol) && b.touching(tol);
          };
          if (touching_at(prev_opening)) {
            opening = prev_opening;
          } else {
            double lo = opening, hi = prev_opening;
            for (int it = 0; it < 60; ++it) {
              const double mid = 0.5 * (lo + hi);
              if (touching_at(mid)) lo = mid; else hi = mid;
            }
            opening = lo;
          }
          std::tie(fp, fm) = finger_probes(opening);
          both = fp.touching(tol) && fm.touching(tol);
        }
        if (both && antipodal_check(fp, fm, env.friction)) {
          grasped = true;
          tr.grasp_established_at = t;
          obj_in_ee = relative_pose(ee, obj);
        }
        phase = Phase::PostClosure;  // this step still records as closing
      }
    }

    TrajectoryStep st;
    st.t = t;
    st.joints = q;
    st.ee_pos = ee.pos;
    st.ee_angle = ee.angle;
    st.gripper_opening = opening;
    st.object_pos = obj.pos;
    st.object_angle = obj.angle;
    st.contact = contact;
    st.phase = record_phase;
    tr.steps.push_back(std::move(st));
  }
  tr.success = grasped && tr.steps.back().object_pos.y >= lift_target;
  return tr;
}

}  // namespace e2r
