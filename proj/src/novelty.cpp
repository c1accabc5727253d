#include "e2r/novelty.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "e2r/parallel.hpp"

namespace e2r {

ReferenceSet build_reference_set(const std::vector<Individual>& pool,
                                 const NoveltyArchive& archive) {
  ReferenceSet refs;
  refs.entries.reserve(pool.size() + archive.entries.size());
  for (const Individual& ind : pool) refs.entries.push_back({ind.desc, ind.id});
  refs.entries.insert(refs.entries.end(), archive.entries.begin(), archive.entries.end());
  refs.pool_count = pool.size();
  return refs;
}

BehaviorDescriptor extract_descriptors(const Trajectory& traj, int episode_steps) {
  if (episode_steps < 2) throw std::invalid_argument("episode_steps must be >= 2");
  if (static_cast<int>(traj.steps.size()) != episode_steps) {
    throw std::invalid_argument("trajectory has " + std::to_string(traj.steps.size()) +
                                " steps, expected " + std::to_string(episode_steps));
  }
  BehaviorDescriptor d;
  const TrajectoryStep& last = traj.steps[episode_steps - 1];
  const TrajectoryStep& mid = traj.steps[episode_steps / 2];
  d.object_final = last.object_pos;
  d.mid_pos = mid.ee_pos;
  d.mid_angle = wrap_angle(mid.ee_angle);
  d.eligible = {true, false, false, true, true};
  if (traj.t_touch) {
    const int t = *traj.t_touch;
    if (t < 0 || t >= episode_steps) throw std::invalid_argument("t_touch outside the episode");
    const TrajectoryStep& touch = traj.steps[t];
    d.touch_pos = touch.ee_pos;
    d.touch_angle = wrap_angle(touch.ee_angle);
    d.eligible[slot::touch_pos] = true;
    d.eligible[slot::touch_angle] = true;
  }
  return d;
}

double slot_distance(const BehaviorDescriptor& a, const BehaviorDescriptor& b, int s) {
  if (s < 0 || s >= slot::count) throw std::invalid_argument("slot out of range");
  if (!a.eligible[s] || !b.eligible[s]) {
    throw std::logic_error("slot " + std::to_string(s) + " queried on an ineligible descriptor");
  }
  if (slot::is_angle(s)) return angular_distance(a.angle(s), b.angle(s));
  return distance(a.position(s), b.position(s));
}

namespace detail {

double mean_of_k_smallest(std::vector<double>& dists, int k) {
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), dists.size());
  std::partial_sort(dists.begin(), dists.begin() + kk, dists.end());
  const double sum = std::accumulate(dists.begin(), dists.begin() + kk, 0.0);
  return sum / static_cast<double>(kk);
}

}  // namespace detail

namespace {

constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

std::optional<double> knn_excluding(const BehaviorDescriptor& x, const ReferenceSet& refs,
                                    int k, int s, std::size_t skip) {
  if (k <= 0) throw std::invalid_argument("k must be >= 1");
  if (s < 0 || s >= slot::count) throw std::invalid_argument("slot out of range");
  if (!x.eligible[s]) throw std::logic_error("novelty queried on an ineligible slot");
  std::vector<double> dists;
  dists.reserve(refs.entries.size());
  for (std::size_t i = 0; i < refs.entries.size(); ++i) {
    if (i == skip) continue;
    const BehaviorDescriptor& r = refs.entries[i].desc;
    if (!r.eligible[s]) continue;
    dists.push_back(slot::is_angle(s) ? angular_distance(x.angle(s), r.angle(s))
                                      : distance(x.position(s), r.position(s)));
  }
  if (dists.empty()) return std::nullopt;
  return detail::mean_of_k_smallest(dists, k);
}

}  // namespace

std::optional<double> knn_novelty(const BehaviorDescriptor& x, const ReferenceSet& refs,
                                  int k, int s) {
  return knn_excluding(x, refs, k, s, kNoExclusion);
}

void update_novelty(std::vector<Individual>& pool, const ReferenceSet& refs, int k) {
  if (pool.empty()) return;
  if (refs.pool_count != pool.size()) {
    throw std::logic_error("reference set was not built from this pool");
  }
  parallel_for(pool.size(), [&](std::size_t i) {
    Individual& ind = pool[i];
    for (int s = 0; s < slot::count; ++s) {
      if (!ind.desc.eligible[s]) {
        ind.novelty[s] = 0.0;
        ind.novelty_valid[s] = false;
        continue;
      }
      const auto score = knn_excluding(ind.desc, refs, k, s, i);
      ind.novelty[s] = score.value_or(0.0);
      ind.novelty_valid[s] = score.has_value();
    }
  });
}

void score_novelty(Individual& ind, const ReferenceSet& refs, int k) {
  for (int s = 0; s < slot::count; ++s) {
    if (!ind.desc.eligible[s]) {
      ind.novelty[s] = 0.0;
      ind.novelty_valid[s] = false;
      continue;
    }
    const auto score = knn_novelty(ind.desc, refs, k, s);
    ind.novelty[s] = score.value_or(0.0);
    ind.novelty_valid[s] = score.has_value();
  }
}

std::array<double, kConcatDims> concat_descriptor(const BehaviorDescriptor& d) {
  std::array<double, kConcatDims> v{};
  if (d.eligible[slot::object_final]) {
    v[0] = d.object_final.x;
    v[1] = d.object_final.y;
  }
  if (d.eligible[slot::touch_pos]) {
    v[2] = d.touch_pos.x;
    v[3] = d.touch_pos.y;
  }
  if (d.eligible[slot::touch_angle]) v[4] = d.touch_angle;
  if (d.eligible[slot::mid_pos]) {
    v[5] = d.mid_pos.x;
    v[6] = d.mid_pos.y;
  }
  if (d.eligible[slot::mid_angle]) v[7] = d.mid_angle;
  return v;
}

}  // namespace e2r
