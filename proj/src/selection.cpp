#include "e2r/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace e2r {

std::vector<std::size_t> sample_indices(std::size_t pool_size, std::size_t n,
                                        std::mt19937_64& rng) {
  if (n > pool_size) throw std::invalid_argument("sample size exceeds pool size");
  std::vector<std::size_t> idx(pool_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool_size - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(n);
  return idx;
}

std::vector<Individual> random_sample(const std::vector<Individual>& pool, std::size_t n,
                                      std::mt19937_64& rng) {
  std::vector<Individual> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(pool.size(), n, rng)) out.push_back(pool[i]);
  return out;
}

std::vector<Individual> multi_bc_sel(const std::vector<Individual>& pool, std::size_t mu) {
  if (pool.size() < mu) throw std::invalid_argument("pool smaller than mu");
  std::vector<bool> taken(pool.size(), false);
  std::vector<Individual> out;
  out.reserve(mu);
  int s = 0;
  int empty_slots_in_a_row = 0;
  while (out.size() < mu) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i] || !pool[i].novelty_valid[s]) continue;
      if (!best || pool[i].novelty[s] > pool[*best].novelty[s]) best = i;
    }
    if (best) {
      taken[*best] = true;
      out.push_back(pool[*best]);
      empty_slots_in_a_row = 0;
    } else if (++empty_slots_in_a_row == slot::count) {
      // No slot has a scored candidate left; fall back to pool order so the
      // selection still returns exactly mu individuals.
      for (std::size_t i = 0; i < pool.size() && out.size() < mu; ++i) {
        if (!taken[i]) {
          taken[i] = true;
          out.push_back(pool[i]);
        }
      }
      break;
    }
    s = (s + 1) % slot::count;
  }
  return out;
}

std::vector<Individual> ns_select(const std::vector<Individual>& pool, const ReferenceSet& refs,
                                  std::size_t mu, int k) {
  if (pool.size() < mu) throw std::invalid_argument("pool smaller than mu");
  if (k <= 0) throw std::invalid_argument("k must be >= 1");
  if (refs.pool_count != pool.size()) {
    throw std::logic_error("reference set was not built from this pool");
  }
  std::vector<std::array<double, kConcatDims>> flat;
  flat.reserve(refs.entries.size());
  for (const auto& e : refs.entries) flat.push_back(concat_descriptor(e.desc));

  auto euclid = [](const std::array<double, kConcatDims>& a,
                   const std::array<double, kConcatDims>& b) {
    double sq = 0.0;
    for (std::size_t d = 0; d < kConcatDims; ++d) {
      const double diff = a[d] - b[d];
      sq += diff * diff;
    }
    return std::sqrt(sq);
  };

  std::vector<double> novelty(pool.size(), 0.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto x = concat_descriptor(pool[i].desc);
    std::vector<double> dists;
    dists.reserve(flat.size());
    for (std::size_t j = 0; j < flat.size(); ++j) {
      if (j == i) continue;
      dists.push_back(euclid(x, flat[j]));
    }
    if (!dists.empty()) novelty[i] = detail::mean_of_k_smallest(dists, k);
  }

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return novelty[a] > novelty[b]; });
  std::vector<Individual> out;
  out.reserve(mu);
  for (std::size_t r = 0; r < mu; ++r) out.push_back(pool[order[r]]);
  return out;
}

std::vector<Individual> random_select(const std::vector<Individual>& pool, std::size_t mu,
                                      std::mt19937_64& rng) {
  if (pool.size() < mu) throw std::invalid_argument("pool smaller than mu");
  return random_sample(pool, mu, rng);
}

namespace {

// Mean of the max-normalized valid slot scores; nullopt when none are valid.
std::optional<double> normalized_mean(const Individual& ind, const std::vector<int>& slots,
                                      const std::array<double, slot::count>& norm) {
  double sum = 0.0;
  int used = 0;
  for (int s : slots) {
    if (!ind.novelty_valid[s]) continue;
    sum += norm[s] > 0.0 ? ind.novelty[s] / norm[s] : 0.0;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

std::vector<std::size_t> rank_by(const std::vector<std::optional<double>>& score,
                                 const std::vector<std::size_t>& candidates) {
  std::vector<std::size_t> order = candidates;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = score[a].value_or(-std::numeric_limits<double>::infinity());
    const double vb = score[b].value_or(-std::numeric_limits<double>::infinity());
    return va > vb;
  });
  return order;
}

}  // namespace

std::vector<RegenPick> regenerate_select(const SuccessArchive& archive, std::size_t mu) {
  const std::vector<Individual>& entries = archive.entries;
  const std::size_t n_r = std::min(mu, entries.size()) / 2;
  std::vector<RegenPick> out;
  if (n_r == 0) return out;

  std::array<double, slot::count> norm{};
  for (const Individual& e : entries) {
    for (int s = 0; s < slot::count; ++s) {
      if (e.novelty_valid[s]) norm[s] = std::max(norm[s], e.novelty[s]);
    }
  }
  const std::vector<int> approach_slots{slot::mid_pos, slot::mid_angle};
  const std::vector<int> prehension_slots{slot::touch_pos, slot::touch_angle};
  std::vector<std::optional<double>> approach(entries.size());
  std::vector<std::optional<double>> prehension(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    approach[i] = normalized_mean(entries[i], approach_slots, norm);
    prehension[i] = normalized_mean(entries[i], prehension_slots, norm);
  }

  std::vector<std::size_t> all(entries.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<bool> taken(entries.size(), false);

  out.reserve(2 * n_r);
  for (std::size_t i : rank_by(approach, all)) {
    if (out.size() == n_r) break;
    taken[i] = true;
    out.push_back({entries[i], MutationKind::Explore});
  }
  std::vector<std::size_t> rest;
  for (std::size_t i : all) {
    if (!taken[i]) rest.push_back(i);
  }
  std::size_t picked = 0;
  for (std::size_t i : rank_by(prehension, rest)) {
    if (picked == n_r) break;
    out.push_back({entries[i], MutationKind::Refine});
    ++picked;
  }
  return out;
}

}  // namespace e2r
