#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/env.hpp"
#include "e2r/model.hpp"

using namespace e2r;

namespace {

// Hand-built grasp: descend straight above the object, pinch, lift. Joint
// targets were derived once from the closed-form pose inverse for the tip poses
// (0.5, 0.22, -pi/2) -> (0.5, 0.10, -pi/2) -> (0.5, 0.30, -pi/2) and are frozen
// here so the episode below is reproducible bit for bit.
Genome grasp_fixture() {
  return Genome{{-0.086388861470371683, 0.46157694334561938, -0.87518808187524766,
                 -0.17191125789378131, 0.49668421205273888, -0.82477295415895768,
                 -0.025791653799708887, 0.41614007166920453, -0.89034841786949559,
                 0.47777777777777786}};
}

// Arm parked at the rest pose for the whole episode; the gripper never comes
// near the object.
Genome idle_fixture() {
  return Genome{{0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0}};
}

// Solves the 4x4 Vandermonde system for the cubic through the given knots and
// evaluates it: an independent check of the interpolation path.
double fitted_cubic(const std::array<double, 4>& ts, const std::array<double, 4>& ys, double t) {
  double m[4][5];
  for (int r = 0; r < 4; ++r) {
    double p = 1.0;
    for (int c = 0; c < 4; ++c) {
      m[r][c] = p;
      p *= ts[r];
    }
    m[r][4] = ys[r];
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    std::swap(m[col], m[piv]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  double coeff[4];
  for (int r = 0; r < 4; ++r) coeff[r] = m[r][4] / m[r][r];
  return coeff[0] + t * (coeff[1] + t * (coeff[2] + t * coeff[3]));
}

bool steps_equal(const TrajectoryStep& a, const TrajectoryStep& b) {
  return a.t == b.t && a.joints == b.joints && a.ee_pos == b.ee_pos &&
         a.ee_angle == b.ee_angle && a.gripper_opening == b.gripper_opening &&
         a.object_pos == b.object_pos && a.object_angle == b.object_angle &&
         a.contact == b.contact && a.phase == b.phase;
}

}  // namespace

TEST_CASE("decode_genome maps genes affinely into joint ranges") {
  EnvConfig env;

  SUBCASE("zero genes hit the range midpoints and close mid-horizon") {
    const auto dec = decode_genome(Genome{std::vector<double>(10, 0.0)}, env);
    REQUIRE(dec.waypoints.size() == 3);
    for (const auto& w : dec.waypoints) {
      REQUIRE(w.size() == 3);
      for (double q : w) CHECK(q == 0.0);  // midpoint of [-pi, pi]
    }
    CHECK(dec.close_step == 90);  // round(0.5 * 0.9 * 200)
  }
  SUBCASE("closure gene endpoints") {
    auto genes = std::vector<double>(10, 0.0);
    genes[9] = 1.0;
    CHECK(decode_genome(Genome{genes}, env).close_step == 180);
    genes[9] = -1.0;
    CHECK(decode_genome(Genome{genes}, env).close_step == 0);
    genes[9] = 133.0 / 90.0 - 1.0;
    CHECK(decode_genome(Genome{genes}, env).close_step == 133);
  }
  SUBCASE("a gene of 0.5 lands three quarters into the range") {
    auto genes = std::vector<double>(10, 0.0);
    genes[0] = 0.5;
    const auto dec = decode_genome(Genome{genes}, env);
    CHECK(dec.waypoints[0][0] == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  }
  SUBCASE("out-of-range genes clamp before mapping") {
    auto genes = std::vector<double>(10, 0.0);
    genes[0] = 1.7;
    genes[3] = -2.3;
    const auto dec = decode_genome(Genome{genes}, env);
    CHECK(dec.waypoints[0][0] == kPi);
    CHECK(dec.waypoints[1][0] == -kPi);
  }
  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(decode_genome(Genome{std::vector<double>(9, 0.0)}, env),
                    std::invalid_argument);
  }
}

TEST_CASE("interpolation passes through its knots and is genuinely cubic") {
  const int T = 200;
  const std::vector<double> q0{0.3, -0.2, 1.1};
  const std::vector<std::vector<double>> wps{{1.0, 0.5, -0.4}, {-0.8, 1.4, 0.2}, {0.1, -1.0, 2.0}};
  const auto plan = interpolate(q0, wps, T);

  SUBCASE("constant knots give a constant curve") {
    const std::vector<double> c{0.7, -0.3, 1.9};
    const auto flat = interpolate(c, {c, c, c}, T);
    for (double t : {0.0, 17.5, 66.0, 133.4, 199.0, 200.0}) {
      const auto q = flat.eval(t);
      for (int j = 0; j < 3; ++j) CHECK(q[j] == doctest::Approx(c[j]).epsilon(1e-12));
    }
  }
  SUBCASE("knot pass-through") {
    const std::array<double, 4> nodes{0.0, T / 3.0, 2.0 * T / 3.0, static_cast<double>(T)};
    for (int j = 0; j < 3; ++j) {
      const std::array<double, 4> ys{q0[j], wps[0][j], wps[1][j], wps[2][j]};
      for (int n = 0; n < 4; ++n) {
        CHECK(plan.eval(nodes[n])[j] == doctest::Approx(ys[n]).epsilon(1e-9));
      }
    }
  }
  SUBCASE("mid-segment values match an independently fitted cubic") {
    const std::array<double, 4> nodes{0.0, T / 3.0, 2.0 * T / 3.0, static_cast<double>(T)};
    for (int j = 0; j < 3; ++j) {
      const std::array<double, 4> ys{q0[j], wps[0][j], wps[1][j], wps[2][j]};
      for (double t : {10.0, 50.0, 100.0, 150.0, 190.0}) {
        CHECK(plan.eval(t)[j] == doctest::Approx(fitted_cubic(nodes, ys, t)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("setpoint clamps into the joint limits") {
    // Push the knots to the range ends so the cubic overshoots between them.
    const std::vector<double> hi{kPi, kPi, kPi};
    const std::vector<double> lo{-kPi, -kPi, -kPi};
    const auto wild = interpolate(lo, {hi, lo, hi}, T);
    const std::vector<std::array<double, 2>> limits{{{-kPi, kPi}}, {{-kPi, kPi}}, {{-kPi, kPi}}};
    bool clamped_somewhere = false;
    for (int t = 0; t < T; ++t) {
      const auto raw = wild.eval(t);
      const auto q = wild.setpoint(t, limits);
      for (int j = 0; j < 3; ++j) {
        CHECK(q[j] == std::clamp(raw[j], -kPi, kPi));
        clamped_somewhere |= raw[j] != q[j];
      }
    }
    CHECK(clamped_somewhere);
  }
  SUBCASE("structural errors") {
    CHECK_THROWS_AS(interpolate(q0, {wps[0], wps[1]}, T), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(q0, {{1.0}, wps[1], wps[2]}, T), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(q0, wps, 1), std::invalid_argument);
    CHECK_THROWS_AS(plan.setpoint(0.0, {{{-1.0, 1.0}}}), std::invalid_argument);
  }
}

TEST_CASE("forward kinematics of the serial chain") {
  EnvConfig env;

  SUBCASE("stretched along x") {
    const Pose p = forward_kinematics({0.0, 0.0, 0.0}, env);
    CHECK(p.pos.x == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(p.pos.y == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.angle == 0.0);
  }
  SUBCASE("stretched straight up") {
    const Pose p = forward_kinematics({kPi / 2.0, 0.0, 0.0}, env);
    CHECK(p.pos.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.pos.y == doctest::Approx(1.15).epsilon(1e-12));
    CHECK(p.angle == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  }
  SUBCASE("agrees with a chain of frame compositions") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> joint(-kPi, kPi);
    for (int trial = 0; trial < 200; ++trial) {
      const std::vector<double> q{joint(rng), joint(rng), joint(rng)};
      Pose p{env.base, 0.0};
      for (int j = 0; j < 3; ++j) {
        p = compose(p, {{0.0, 0.0}, q[j]});
        p = compose(p, {{env.link_lengths[j], 0.0}, 0.0});
      }
      const Pose fk = forward_kinematics(q, env);
      CHECK(fk.pos.x == doctest::Approx(p.pos.x).epsilon(1e-12));
      CHECK(fk.pos.y == doctest::Approx(p.pos.y).epsilon(1e-12));
      CHECK(angular_distance(fk.angle, p.angle) < 1e-12);
    }
  }
  SUBCASE("chain_points walks base to tip") {
    const std::vector<double> q{0.4, -0.9, 1.3};
    const auto pts = chain_points(q, env);
    REQUIRE(pts.size() == 4);
    CHECK(pts.front() == env.base);
    const Pose fk = forward_kinematics(q, env);
    CHECK(pts.back() == fk.pos);
    for (int j = 0; j < 3; ++j) {
      CHECK(distance(pts[j], pts[j + 1]) == doctest::Approx(env.link_lengths[j]).epsilon(1e-12));
    }
  }
  SUBCASE("joint count mismatch is rejected") {
    CHECK_THROWS_AS(forward_kinematics({0.0, 0.0}, env), std::invalid_argument);
    CHECK_THROWS_AS(chain_points({0.0}, env), std::invalid_argument);
  }
}

TEST_CASE("pose inverse round-trips through forward kinematics") {
  EnvConfig env;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> joint(-2.5, 2.5);
  int both_branches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<double> q{joint(rng), joint(rng), joint(rng)};
    const Pose target = forward_kinematics(q, env);
    for (bool elbow_up : {false, true}) {
      const auto sol = inverse_kinematics(target, env, elbow_up);
      if (!sol) continue;
      ++both_branches;
      const Pose back = forward_kinematics(*sol, env);
      CHECK(distance(back.pos, target.pos) < 1e-9);
      CHECK(angular_distance(back.angle, target.angle) < 1e-9);
      for (int j = 0; j < 3; ++j) {
        CHECK((*sol)[j] >= env.joint_limits[j][0]);
        CHECK((*sol)[j] <= env.joint_limits[j][1]);
      }
    }
  }
  CHECK(both_branches > 300);  // most poses admit both elbow branches

  SUBCASE("unreachable poses return nothing") {
    CHECK_FALSE(inverse_kinematics({{5.0, 5.0}, 0.0}, env).has_value());
    // wrist ends up just beyond the first two links
    CHECK_FALSE(inverse_kinematics({{env.base.x + 0.91, env.base.y}, 0.0}, env).has_value());
  }
  SUBCASE("only the three-joint arm is supported") {
    EnvConfig two = env;
    two.link_lengths = {0.4, 0.3};
    two.joint_limits = {{{-kPi, kPi}}, {{-kPi, kPi}}};
    two.rest_config = {kPi / 2.0, 0.0};
    CHECK_FALSE(inverse_kinematics({{0.3, 0.3}, 0.0}, two).has_value());
  }
}

TEST_CASE("gripper geometry: fingers along the approach axis, palm across it") {
  GripperConfig gr;
  const auto gg = gripper_segments({{0.2, 0.3}, 0.0}, 0.1, gr);
  CHECK(gg.finger_plus.a == Vec2{0.2, 0.35});
  CHECK(gg.finger_plus.b == Vec2{0.26, 0.35});
  CHECK(gg.finger_minus.a == Vec2{0.2, 0.25});
  CHECK(gg.finger_minus.b == Vec2{0.26, 0.25});
  CHECK(gg.palm.a == gg.finger_minus.a);
  CHECK(gg.palm.b == gg.finger_plus.a);

  // pointing straight down the fingers hang below the wrist
  const auto dn = gripper_segments({{0.5, 0.1}, -kPi / 2.0}, 0.08, gr);
  CHECK(dn.finger_plus.a.x == doctest::Approx(0.54).epsilon(1e-12));
  CHECK(dn.finger_plus.b.y == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(dn.finger_minus.a.x == doctest::Approx(0.46).epsilon(1e-12));
}

TEST_CASE("surface probes against the circle") {
  ObjectConfig obj;  // circle, r = 0.04
  const Pose pose{{0.5, 0.04}, 0.0};

  SUBCASE("separated from above") {
    const auto p = probe_segment({{0.4, 0.2}, {0.6, 0.2}}, obj, pose);
    CHECK(p.gap == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(p.normal.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.normal.y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.point.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.point.y == doctest::Approx(0.08).epsilon(1e-12));
    CHECK_FALSE(p.touching(1e-3));
    CHECK_FALSE(p.penetrating());
    CHECK(p.depth() == 0.0);
  }
  SUBCASE("touching on the side") {
    const auto p = probe_segment({{0.58, 0.0}, {0.58, 0.2}}, obj, pose);
    CHECK(p.gap == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(p.normal.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.normal.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.touching(0.05));
  }
  SUBCASE("segment through the center degenerates to the upward normal") {
    const auto p = probe_segment({{0.5, -0.1}, {0.5, 0.1}}, obj, pose);
    CHECK(p.gap == doctest::Approx(-0.04).epsilon(1e-12));
    CHECK(p.normal == Vec2{0.0, 1.0});
    CHECK(p.penetrating());
    CHECK(p.depth() == doctest::Approx(0.04).epsilon(1e-12));
  }
}

TEST_CASE("surface probes against the box") {
  ObjectConfig obj;
  obj.shape = ShapeKind::Box;
  obj.half_extents = {0.03, 0.02};
  const Pose pose{{0.5, 0.02}, 0.0};

  SUBCASE("separated above the top face") {
    const auto p = probe_segment({{0.45, 0.1}, {0.55, 0.1}}, obj, pose);
    CHECK(p.gap == doctest::Approx(0.06).epsilon(1e-9));
    CHECK(p.normal.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p.normal.y == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("penetrating through the top face") {
    const auto p = probe_segment({{0.5, 0.03}, {0.5, 0.2}}, obj, pose);
    CHECK(p.gap == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(p.normal.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p.normal.y == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.point.x == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(p.point.y == doctest::Approx(0.04).epsilon(1e-6));
  }
  SUBCASE("side approach sees the lateral face normal") {
    const auto p = probe_segment({{0.56, 0.0}, {0.56, 0.05}}, obj, pose);
    CHECK(p.gap == doctest::Approx(0.03).epsilon(1e-9));
    CHECK(p.normal.x == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("rotation carries the normals along") {
    const Pose tilted{{0.5, 0.05}, kPi / 2.0};  // box standing on its short side
    const auto p = probe_segment({{0.6, 0.05}, {0.8, 0.05}}, obj, tilted);
    // the segment faces the local -y face, whose normal rotates to world +x
    CHECK(p.gap == doctest::Approx(0.08).epsilon(1e-9));
    CHECK(p.normal.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(p.normal.y) < 1e-9);
  }
}

TEST_CASE("antipodal grasp test against the friction cone") {
  auto probe = [](Vec2 n) {
    SurfaceProbe p;
    p.normal = n;
    return p;
  };

  SUBCASE("perfectly opposed contacts pass even without friction") {
    CHECK(antipodal_check(probe({0.0, 1.0}), probe({0.0, -1.0}), 0.0));
    CHECK(antipodal_check(probe({1.0, 0.0}), probe({-1.0, 0.0}), 0.5));
  }
  SUBCASE("orthogonal contacts fail at moderate friction") {
    CHECK_FALSE(antipodal_check(probe({1.0, 0.0}), probe({0.0, 1.0}), 0.5));
  }
  SUBCASE("a 40 degree opposition passes at friction 0.5") {
    const double a = 40.0 * kPi / 180.0;
    CHECK(antipodal_check(probe({0.0, 1.0}), probe({-std::sin(a), -std::cos(a)}), 0.5));
  }
  SUBCASE("the cone boundary is sharp") {
    const double edge = 2.0 * std::atan(0.5);
    auto opposed_at = [&](double ang) {
      return probe({-std::sin(ang), -std::cos(ang)});
    };
    CHECK(antipodal_check(probe({0.0, 1.0}), opposed_at(edge - 1e-6), 0.5));
    CHECK_FALSE(antipodal_check(probe({0.0, 1.0}), opposed_at(edge + 1e-6), 0.5));
  }
  SUBCASE("unnormalized normals are handled") {
    CHECK(antipodal_check(probe({0.0, 3.0}), probe({0.0, -0.2}), 0.1));
  }
  SUBCASE("negative friction is rejected") {
    CHECK_THROWS_AS(antipodal_check(probe({0.0, 1.0}), probe({0.0, -1.0}), -0.1),
                    std::invalid_argument);
  }
  SUBCASE("agrees with the half-angle cosine form on random normals") {
    // acos(n1 . -n2) <= 2*atan(f)  <=>  n1 . -n2 >= (1 - f^2) / (1 + f^2)
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    std::uniform_real_distribution<double> fric(0.0, 2.0);
    for (int trial = 0; trial < 100000; ++trial) {
      const double a1 = ang(rng), a2 = ang(rng), f = fric(rng);
      const Vec2 n1{std::cos(a1), std::sin(a1)};
      const Vec2 n2{std::cos(a2), std::sin(a2)};
      const bool want = n1.dot(-1.0 * n2) >= (1.0 - f * f) / (1.0 + f * f);
      CHECK(antipodal_check(probe(n1), probe(n2), f) == want);
    }
  }
}

TEST_CASE("push resolution slides the object horizontally by the penetration depth") {
  const Pose obj{{0.5, 0.04}, 0.0};
  auto contact = [](Vec2 n, double gap) {
    SurfaceProbe p;
    p.normal = n;
    p.gap = gap;
    return p;
  };

  SUBCASE("a contact on the left face pushes right") {
    const Pose out = push_resolve(obj, contact({-1.0, 0.0}, -0.004));
    CHECK(out.pos.x == doctest::Approx(0.504).epsilon(1e-15));
    CHECK(out.pos.y == obj.pos.y);
    CHECK(out.angle == obj.angle);
  }
  SUBCASE("a contact on the right face pushes left") {
    const Pose out = push_resolve(obj, contact({1.0, 0.0}, -0.004));
    CHECK(out.pos.x == doctest::Approx(0.496).epsilon(1e-15));
  }
  SUBCASE("an oblique contact still moves by the full depth") {
    const Pose out = push_resolve(obj, contact({-0.6, 0.8}, -0.01));
    CHECK(out.pos.x == doctest::Approx(0.51).epsilon(1e-12));
  }
  SUBCASE("vertical-only contacts leave the pose alone") {
    CHECK(push_resolve(obj, contact({0.0, 1.0}, -0.01)) == obj);
    CHECK(push_resolve(obj, contact({0.0, -1.0}, -0.01)) == obj);
  }
  SUBCASE("separated probes leave the pose alone") {
    CHECK(push_resolve(obj, contact({-1.0, 0.0}, 0.02)) == obj);
  }
  SUBCASE("successive pushes accumulate") {
    Pose p = obj;
    for (int i = 0; i < 5; ++i) p = push_resolve(p, contact({-1.0, 0.0}, -0.002));
    CHECK(p.pos.x == doctest::Approx(0.51).epsilon(1e-12));
  }
}

TEST_CASE("pose composition and its inverse") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose frame{{u(rng), u(rng)}, u(rng)};
    const Pose local{{u(rng), u(rng)}, u(rng)};
    const Pose world = compose(frame, local);
    const Pose back = relative_pose(frame, world);
    CHECK(distance(back.pos, local.pos) < 1e-12);
    CHECK(angular_distance(back.angle, local.angle) < 1e-12);
  }
}

TEST_CASE("an idle episode never disturbs the object") {
  EnvConfig env;
  const auto tr = rollout(idle_fixture(), env);

  REQUIRE(static_cast<int>(tr.steps.size()) == env.episode_steps);
  for (int t = 0; t < env.episode_steps; ++t) CHECK(tr.steps[t].t == t);

  CHECK_FALSE(tr.success);
  CHECK_FALSE(tr.t_touch.has_value());
  CHECK_FALSE(tr.grasp_established_at.has_value());
  CHECK_FALSE(tr.first_contact.has_value());

  const Vec2 initial = env.object.initial_position();
  for (const auto& st : tr.steps) {
    CHECK(st.object_pos == initial);  // bitwise: nothing may touch it
    CHECK(st.object_angle == 0.0);
    CHECK_FALSE(st.contact[0]);
    CHECK_FALSE(st.contact[1]);
    CHECK_FALSE(st.contact[2]);
  }

  // closure still runs on schedule: approach to t=89, then 20 closing steps
  CHECK(tr.steps[89].phase == Phase::Approach);
  CHECK(tr.steps[90].phase == Phase::Closing);
  CHECK(tr.steps[109].phase == Phase::Closing);
  CHECK(tr.steps[110].phase == Phase::PostClosure);
  CHECK(tr.steps[109].gripper_opening == 0.0);
  CHECK(tr.steps.back().gripper_opening == 0.0);
}

TEST_CASE("the frozen grasp fixture succeeds and obeys the episode contract") {
  EnvConfig env;
  const Genome g = grasp_fixture();
  const auto tr = rollout(g, env);

  REQUIRE(static_cast<int>(tr.steps.size()) == env.episode_steps);
  CHECK(tr.success);
  REQUIRE(tr.t_touch.has_value());
  REQUIRE(tr.grasp_established_at.has_value());
  REQUIRE(tr.first_contact.has_value());
  CHECK(*tr.t_touch == 83);
  CHECK(*tr.grasp_established_at == 139);
  CHECK(*tr.t_touch <= *tr.grasp_established_at);
  CHECK(decode_genome(g, env).close_step == 133);

  SUBCASE("a second identical episode reproduces every step bitwise") {
    const auto again = rollout(g, env);
    REQUIRE(again.steps.size() == tr.steps.size());
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
      CHECK(steps_equal(tr.steps[i], again.steps[i]));
    }
    CHECK(again.success == tr.success);
    CHECK(again.t_touch == tr.t_touch);
    CHECK(again.grasp_established_at == tr.grasp_established_at);
  }

  SUBCASE("phases advance monotonically") {
    int last = static_cast<int>(Phase::Approach);
    for (const auto& st : tr.steps) {
      CHECK(static_cast<int>(st.phase) >= last);
      last = static_cast<int>(st.phase);
    }
    CHECK(tr.steps[132].phase == Phase::Approach);
    CHECK(tr.steps[133].phase == Phase::Closing);
    CHECK(tr.steps[140].phase == Phase::PostClosure);
  }

  SUBCASE("the arm is frozen while the gripper closes") {
    std::vector<const TrajectoryStep*> closing;
    for (const auto& st : tr.steps) {
      if (st.phase == Phase::Closing) closing.push_back(&st);
    }
    REQUIRE_FALSE(closing.empty());
    for (const auto* st : closing) {
      CHECK(st->joints == closing.front()->joints);  // bitwise identical
      CHECK(st->ee_pos == closing.front()->ee_pos);
    }
  }

  SUBCASE("the opening ratchets down by the closure speed") {
    const double speed = env.gripper.closure_speed;
    int partial_steps = 0;
    for (std::size_t i = 1; i < tr.steps.size(); ++i) {
      const auto& prev = tr.steps[i - 1];
      const auto& cur = tr.steps[i];
      CHECK(cur.gripper_opening >= 0.0);
      CHECK(cur.gripper_opening <= env.gripper.max_opening);
      if (cur.phase != Phase::Closing) continue;
      const double drop = prev.gripper_opening - cur.gripper_opening;
      CHECK(drop > 0.0);
      CHECK(drop <= speed + 1e-12);
      if (std::fabs(drop - speed) > 1e-12) {
        ++partial_steps;
        CHECK(cur.phase == Phase::Closing);
        CHECK(tr.steps[i + 1].phase == Phase::PostClosure);  // only the last closing step
      }
    }
    CHECK(partial_steps <= 1);
  }

  SUBCASE("the object stays on the floor until the grasp lifts it") {
    const double rest_y = env.object.resting_y();
    for (int t = 0; t <= *tr.grasp_established_at; ++t) {
      CHECK(tr.steps[t].object_pos.y == rest_y);
      CHECK(tr.steps[t].object_angle == 0.0);
    }
    CHECK(tr.steps.back().object_pos.y >=
          env.object.initial_position().y + env.lift_height - 1e-12);
  }

  SUBCASE("after the grasp the object is rigidly attached to the hand") {
    const int t0 = *tr.grasp_established_at + 1;
    const auto& base = tr.steps[t0];
    const Pose rel0 = relative_pose({base.ee_pos, base.ee_angle},
                                    {base.object_pos, base.object_angle});
    for (std::size_t t = t0; t < tr.steps.size(); ++t) {
      const auto& st = tr.steps[t];
      const Pose rel = relative_pose({st.ee_pos, st.ee_angle}, {st.object_pos, st.object_angle});
      CHECK(distance(rel.pos, rel0.pos) < 1e-9);
      CHECK(angular_distance(rel.angle, rel0.angle) < 1e-9);
    }
  }
}

TEST_CASE("a late closure gene can consume the rest of the episode") {
  EnvConfig env;
  auto genes = idle_fixture().genes;
  genes[9] = 1.0;  // close at step 180; 20 closing steps reach exactly T
  const auto tr = rollout(Genome{genes}, env);
  CHECK(tr.steps[179].phase == Phase::Approach);
  CHECK(tr.steps[180].phase == Phase::Closing);
  CHECK(tr.steps.back().phase == Phase::Closing);
  CHECK(tr.steps.back().gripper_opening == 0.0);
}

TEST_CASE("an immediate closure gene starts the episode closing") {
  EnvConfig env;
  auto genes = idle_fixture().genes;
  genes[9] = -1.0;
  const auto tr = rollout(Genome{genes}, env);
  CHECK(tr.steps.front().phase == Phase::Closing);
  CHECK(tr.steps.front().gripper_opening ==
        doctest::Approx(env.gripper.max_opening - env.gripper.closure_speed).epsilon(1e-15));
}

TEST_CASE("rollout rejects a genome of the wrong length") {
  EnvConfig env;
  CHECK_THROWS_AS(rollout(Genome{std::vector<double>(7, 0.0)}, env), std::invalid_argument);
}
