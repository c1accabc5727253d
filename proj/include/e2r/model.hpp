#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace e2r {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  Vec2 perp() const { return {-y, x}; }
  Vec2 rotated(double a) const {
    const double c = std::cos(a), s = std::sin(a);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Pose {
  Vec2 pos{};
  double angle = 0.0;
  friend bool operator==(const Pose&, const Pose&) = default;
};

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// Shortest-arc distance between two angles, in [0, pi].
inline double angular_distance(double a, double b) {
  const double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, 2.0 * kPi - d);
}

// Gene layout for an arm with J joints: [0,J) waypoint 1, [J,2J) waypoint 2,
// [2J,3J) waypoint 3, [3J] closure timing. All genes live in [-1, 1].
struct Genome {
  std::vector<double> genes;

  Genome() = default;
  explicit Genome(std::vector<double> g) : genes(std::move(g)) {}

  std::size_t size() const { return genes.size(); }
  int joints() const { return static_cast<int>((genes.size() - 1) / 3); }
  double& operator[](std::size_t i) { return genes[i]; }
  double operator[](std::size_t i) const { return genes[i]; }
  friend bool operator==(const Genome&, const Genome&) = default;
};

// Throws if the genome length is not 3*J+1; otherwise clamps every gene to [-1, 1].
Genome genome_clamp(Genome g);
bool genome_in_range(const Genome& g);

namespace slot {
inline constexpr int object_final = 0;  // object position at episode end
inline constexpr int touch_pos = 1;     // end-effector position at first touch
inline constexpr int touch_angle = 2;   // end-effector orientation at first touch
inline constexpr int mid_pos = 3;       // end-effector position at mid-episode
inline constexpr int mid_angle = 4;     // end-effector orientation at mid-episode
inline constexpr int count = 5;

inline constexpr bool is_angle(int s) { return s == touch_angle || s == mid_angle; }
}  // namespace slot

struct BehaviorDescriptor {
  Vec2 object_final{};
  Vec2 touch_pos{};
  double touch_angle = 0.0;
  Vec2 mid_pos{};
  double mid_angle = 0.0;
  // Touch slots become eligible only when the trajectory recorded a first touch.
  std::array<bool, slot::count> eligible{true, false, false, true, true};

  Vec2 position(int s) const;
  double angle(int s) const;
  friend bool operator==(const BehaviorDescriptor&, const BehaviorDescriptor&) = default;
};

enum class MutationKind { Init, Explore, Refine, Uniform };

std::string to_string(MutationKind k);
std::optional<MutationKind> mutation_kind_from(const std::string& name);

enum class Phase { Approach, Closing, PostClosure };

std::string to_string(Phase p);

struct TrajectoryStep {
  int t = 0;
  std::vector<double> joints;
  Vec2 ee_pos{};
  double ee_angle = 0.0;
  double gripper_opening = 0.0;
  Vec2 object_pos{};
  double object_angle = 0.0;
  std::array<bool, 3> contact{{false, false, false}};  // finger+, finger-, palm
  Phase phase = Phase::Approach;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::optional<int> t_touch;
  std::optional<int> grasp_established_at;
  std::optional<Vec2> first_contact;  // on the object boundary, world frame
  bool success = false;
};

struct EvalSummary {
  std::optional<int> t_touch;
  std::optional<int> grasp_step;
  std::optional<Vec2> first_contact;
  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

struct IndividualMeta {
  int generation = 0;
  std::optional<std::uint64_t> parent;
  MutationKind kind = MutationKind::Init;
  friend bool operator==(const IndividualMeta&, const IndividualMeta&) = default;
};

struct Individual {
  std::uint64_t id = 0;
  Genome genome;
  BehaviorDescriptor desc;
  std::array<double, slot::count> novelty{};
  std::array<bool, slot::count> novelty_valid{};
  bool success = false;
  EvalSummary summary;
  IndividualMeta meta;
  // Set by regeneration; consumed the first time the individual is sampled as a parent.
  std::optional<MutationKind> pending_hint;

  friend bool operator==(const Individual&, const Individual&) = default;
};

// Append-only store of behavior descriptors sampled from past offspring.
struct NoveltyArchive {
  struct Entry {
    BehaviorDescriptor desc;
    std::uint64_t owner = 0;  // id of the originating individual
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
};

// Append-only store of every harvested individual whose rollout produced a grasp.
struct SuccessArchive {
  std::vector<Individual> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct GenerationLog {
  int generation = 0;
  long long rollouts = 0;         // cumulative, including initialization
  long long successes_total = 0;  // success archive size after this generation
  long long archive_size = 0;     // novelty archive size after this generation
  int successes_gen = 0;
  double approach_coverage = 0.0;
  double grasp_coverage = 0.0;
  double wall_time_s = 0.0;  // measured; artifacts persist a zero so files stay reproducible
  bool impatience_fired = false;
  bool regenerated = false;
};

}  // namespace e2r
