#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/model.hpp"

namespace e2r {

// Stream tags keep every RNG consumer on its own deterministic substream.
namespace streams {
inline constexpr std::uint32_t init = 1;
inline constexpr std::uint32_t parent_sample = 2;
inline constexpr std::uint32_t mutate = 3;
inline constexpr std::uint32_t archive_sample = 4;
inline constexpr std::uint32_t selection = 5;
}  // namespace streams

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint32_t tag, std::uint64_t a = 0,
                           std::uint64_t b = 0);

struct MutationParams {
  double sigma_big = 0.3;
  double sigma_small = 0.01;
  double sigma_uniform = 0.1;

  static MutationParams from(const RunConfig& cfg) {
    return {cfg.sigma_big, cfg.sigma_small, cfg.sigma_uniform};
  }
};

// mu genomes of length 3*joints+1 with genes i.i.d. uniform on [-1, 1].
std::vector<Genome> init_pop(int mu, int joints, std::mt19937_64& rng);

// Gaussian noise with sigma_big on waypoint-1 genes and sigma_small on the rest
// (waypoints 2-3 and the closure gene), clamped back into range. A zero sigma
// leaves its group bit-exact.
Genome mutate_explore(const Genome& g, const MutationParams& p, std::mt19937_64& rng);

// Mirror of mutate_explore: sigma_small on waypoint 1, sigma_big on the rest.
Genome mutate_refine(const Genome& g, const MutationParams& p, std::mt19937_64& rng);

// One sigma for every gene.
Genome mutate_uniform(const Genome& g, double sigma, std::mt19937_64& rng);

struct MutatedGenome {
  Genome genome;
  MutationKind kind = MutationKind::Explore;
};

// Per element: an explore/refine coin with probability p_explore, then the chosen
// operator. Each element runs on its own substream of (seed, stream), so results
// do not depend on evaluation order. forced, when non-empty, overrides the coin
// for the elements where it is set.
std::vector<MutatedGenome> mutate_er(const std::vector<Genome>& batch, double p_explore,
                                     double p_refine, const MutationParams& params,
                                     std::uint64_t seed, std::uint64_t stream = 0,
                                     std::span<const std::optional<MutationKind>> forced = {});

}  // namespace e2r
