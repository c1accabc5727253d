#pragma once

#include <array>
#include <optional>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/model.hpp"

namespace e2r {

struct Segment {
  Vec2 a{};
  Vec2 b{};
};

// Closest-feature query against the object surface. normal is the outward
// surface normal at point; gap is positive separation, negative penetration.
struct SurfaceProbe {
  Vec2 point{};
  Vec2 normal{0.0, 1.0};
  double gap = 0.0;

  bool touching(double tol) const { return gap <= tol; }
  bool penetrating() const { return gap < 0.0; }
  double depth() const { return gap < 0.0 ? -gap : 0.0; }
};

struct DecodedGenome {
  std::vector<std::vector<double>> waypoints;  // 3 x J joint-space targets
  int close_step = 0;
};

// Maps waypoint genes affinely into the joint ranges and the closure gene onto
// [0, 0.9*T]. Out-of-range genes are clamped first.
DecodedGenome decode_genome(const Genome& g, const EnvConfig& env);

// Per-joint cubic through (0, q0), (T/3, w1), (2T/3, w2), (T, w3), evaluated by
// the Lagrange form so the curve passes through the knots exactly.
class CubicTrajectory {
 public:
  CubicTrajectory(const std::vector<double>& q0,
                  const std::vector<std::vector<double>>& waypoints, int episode_steps);

  std::vector<double> eval(double t) const;
  // eval clamped into the joint limits.
  std::vector<double> setpoint(double t, const std::vector<std::array<double, 2>>& limits) const;

 private:
  std::array<double, 4> nodes_{};
  std::vector<std::array<double, 4>> values_;  // per joint
};

CubicTrajectory interpolate(const std::vector<double>& q0,
                            const std::vector<std::vector<double>>& waypoints,
                            int episode_steps);

// Tip pose of the serial chain: links rotate by the cumulative joint angle.
Pose forward_kinematics(const std::vector<double>& q, const EnvConfig& env);

// base, joint positions, tip; for rendering and debugging.
std::vector<Vec2> chain_points(const std::vector<double>& q, const EnvConfig& env);

// Closed-form pose inverse for the three-joint arm; nullopt when the pose is out
// of reach or violates the joint limits.
std::optional<std::vector<double>> inverse_kinematics(const Pose& tip, const EnvConfig& env,
                                                      bool elbow_up = false);

struct GripperGeometry {
  Segment finger_plus;   // at +opening/2 laterally
  Segment finger_minus;  // at -opening/2
  Segment palm;
};

GripperGeometry gripper_segments(const Pose& ee, double opening, const GripperConfig& gripper);

SurfaceProbe probe_segment(const Segment& s, const ObjectConfig& obj, const Pose& obj_pose);

// Two-contact grasp test: the angle between n1 and -n2 must stay within twice
// the friction-cone half-angle arctan(friction).
bool antipodal_check(const SurfaceProbe& c1, const SurfaceProbe& c2, double friction);

// Slides the object horizontally by the penetration depth, pushing along the
// horizontal component of the inward contact normal. Vertical-only contacts and
// non-penetrating probes leave the pose unchanged.
Pose push_resolve(Pose object, const SurfaceProbe& contact);

Pose compose(const Pose& frame, const Pose& local);
Pose relative_pose(const Pose& frame, const Pose& world);

// Deterministic open-loop episode: track the decoded waypoint trajectory, freeze
// the arm while the gripper closes at close_step, test the final pinch for an
// antipodal grasp, then resume tracking with the object rigidly attached when
// the grasp held. Success requires the grasp to persist to the last step with
// the object lifted by at least lift_height.
Trajectory rollout(const Genome& g, const EnvConfig& env);

}  // namespace e2r
