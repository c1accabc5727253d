#include "e2r/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace e2r {

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint32_t tag, std::uint64_t a,
                           std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    tag,
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Genome> init_pop(int mu, int joints, std::mt19937_64& rng) {
  if (mu < 0) throw std::invalid_argument("mu must be non-negative");
  if (joints < 1) throw std::invalid_argument("need at least one joint");
  std::uniform_real_distribution<double> gene(-1.0, 1.0);
  std::vector<Genome> pop;
  pop.reserve(mu);
  const int len = 3 * joints + 1;
  for (int i = 0; i < mu; ++i) {
    Genome g;
    g.genes.resize(len);
    for (double& v : g.genes) v = gene(rng);
    pop.push_back(std::move(g));
  }
  return pop;
}

namespace {

Genome mutate_grouped(const Genome& g, double sigma_wp1, double sigma_rest,
                      std::mt19937_64& rng) {
  if (g.size() < 4 || g.size() % 3 != 1) {
    throw std::invalid_argument("genome length must be 3*J+1, got " + std::to_string(g.size()));
  }
  const std::size_t joints = static_cast<std::size_t>(g.joints());
  Genome out = g;
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double sigma = i < joints ? sigma_wp1 : sigma_rest;
    if (sigma > 0.0) out[i] = std::clamp(out[i] + sigma * noise(rng), -1.0, 1.0);
  }
  return out;
}

}  // namespace

Genome mutate_explore(const Genome& g, const MutationParams& p, std::mt19937_64& rng) {
  return mutate_grouped(g, p.sigma_big, p.sigma_small, rng);
}

Genome mutate_refine(const Genome& g, const MutationParams& p, std::mt19937_64& rng) {
  return mutate_grouped(g, p.sigma_small, p.sigma_big, rng);
}

Genome mutate_uniform(const Genome& g, double sigma, std::mt19937_64& rng) {
  if (g.size() < 4 || g.size() % 3 != 1) {
    throw std::invalid_argument("genome length must be 3*J+1, got " + std::to_string(g.size()));
  }
  if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
  Genome out = g;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& v : out.genes) v = std::clamp(v + sigma * noise(rng), -1.0, 1.0);
  return out;
}

std::vector<MutatedGenome> mutate_er(const std::vector<Genome>& batch, double p_explore,
                                     double p_refine, const MutationParams& params,
                                     std::uint64_t seed, std::uint64_t stream,
                                     std::span<const std::optional<MutationKind>> forced) {
  if (p_explore < 0.0 || p_explore > 1.0 || p_refine < 0.0 || p_refine > 1.0 ||
      std::fabs(p_explore + p_refine - 1.0) > 1e-9) {
    throw std::invalid_argument("p_explore and p_refine must be in [0, 1] and sum to 1");
  }
  if (!forced.empty() && forced.size() != batch.size()) {
    throw std::invalid_argument("forced kinds must match the batch size");
  }
  std::vector<MutatedGenome> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto rng = rng_stream(seed, streams::mutate, stream, i);
    MutationKind kind;
    if (!forced.empty() && forced[i]) {
      kind = *forced[i];
      if (kind != MutationKind::Explore && kind != MutationKind::Refine) {
        throw std::invalid_argument("forced kind must be explore or refine");
      }
    } else {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      kind = coin(rng) < p_explore ? MutationKind::Explore : MutationKind::Refine;
    }
    Genome mutated = kind == MutationKind::Explore ? mutate_explore(batch[i], params, rng)
                                                   : mutate_refine(batch[i], params, rng);
    out.push_back({std::move(mutated), kind});
  }
  return out;
}

}  // namespace e2r
