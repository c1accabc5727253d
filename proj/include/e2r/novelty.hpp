#pragma once

#include <array>
#include <optional>
#include <vector>

#include "e2r/model.hpp"

namespace e2r {

// Descriptors an individual is scored against. When built from a scored pool the
// first pool_count entries mirror that pool in order, which lets update_novelty
// exclude each individual's own entry.
struct ReferenceSet {
  std::vector<NoveltyArchive::Entry> entries;
  std::size_t pool_count = 0;

  std::size_t size() const { return entries.size(); }
};

ReferenceSet build_reference_set(const std::vector<Individual>& pool,
                                 const NoveltyArchive& archive);

// Reads the behavior slots out of a finished trajectory: object position at the
// final step, end-effector pose at floor(T/2), and end-effector pose at the first
// touch when one happened.
BehaviorDescriptor extract_descriptors(const Trajectory& traj, int episode_steps);

// Euclidean for position slots, shortest-arc for angle slots. Both descriptors
// must be eligible on the slot.
double slot_distance(const BehaviorDescriptor& a, const BehaviorDescriptor& b, int s);

// Mean distance to the k nearest slot-eligible references; averages over all of
// them when fewer than k exist. Returns nullopt when no reference is eligible.
// The caller must not include x itself in refs.
std::optional<double> knn_novelty(const BehaviorDescriptor& x, const ReferenceSet& refs,
                                  int k, int s);

// Fills novelty and novelty_valid on every pool member, each scored against refs
// minus its own entry. Requires refs built from this pool (pool_count matches).
void update_novelty(std::vector<Individual>& pool, const ReferenceSet& refs, int k);

// Scores one individual against the full reference set (no self-exclusion).
void score_novelty(Individual& ind, const ReferenceSet& refs, int k);

// Slot values flattened to [b1.x, b1.y, b2.x, b2.y, b3, b4.x, b4.y, b5] with
// ineligible components set to zero.
inline constexpr std::size_t kConcatDims = 8;
std::array<double, kConcatDims> concat_descriptor(const BehaviorDescriptor& d);

namespace detail {
// Mean of the k smallest values; sorts them first so the result does not depend
// on the input order. Empty input is the caller's responsibility.
double mean_of_k_smallest(std::vector<double>& dists, int k);
}  // namespace detail

}  // namespace e2r
