#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "e2r/model.hpp"
#include "e2r/novelty.hpp"

namespace e2r {

// Uniform sample of n distinct indices from [0, pool_size), by partial shuffle.
std::vector<std::size_t> sample_indices(std::size_t pool_size, std::size_t n,
                                        std::mt19937_64& rng);

// Uniform sample of n distinct individuals.
std::vector<Individual> random_sample(const std::vector<Individual>& pool, std::size_t n,
                                      std::mt19937_64& rng);

// Survivor selection cycling over the behavior slots: each turn takes the
// not-yet-selected individual with the highest valid novelty on the current
// slot, skipping slots with no eligible candidate left. Ties break toward the
// earlier pool index, so the result is a pure function of the pool.
std::vector<Individual> multi_bc_sel(const std::vector<Individual>& pool, std::size_t mu);

// Survivor selection on a single scalar novelty: each individual's descriptor is
// flattened (ineligible components zeroed) and scored with the k-nearest mean
// over the flattened reference set, excluding its own entry. Top mu win; ties
// break toward the earlier pool index.
std::vector<Individual> ns_select(const std::vector<Individual>& pool, const ReferenceSet& refs,
                                  std::size_t mu, int k);

std::vector<Individual> random_select(const std::vector<Individual>& pool, std::size_t mu,
                                      std::mt19937_64& rng);

struct RegenPick {
  Individual individual;
  MutationKind hint = MutationKind::Explore;
};

// Picks floor(min(mu, |archive|)/2) entries with the highest approach novelty
// (mid-episode slots) and, from the remainder, as many with the highest
// prehension novelty (touch slots). Slot scores are normalized by the archive
// maximum before averaging so meters and radians mix evenly. Approach picks
// carry an explore hint, prehension picks a refine hint.
std::vector<RegenPick> regenerate_select(const SuccessArchive& archive, std::size_t mu);

}  // namespace e2r
