#include "e2r/engine.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "e2r/env.hpp"
#include "e2r/metrics.hpp"
#include "e2r/novelty.hpp"
#include "e2r/parallel.hpp"
#include "e2r/selection.hpp"
#include "e2r/variation.hpp"

namespace e2r {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::E2R: return "e2r";
    case Strategy::NS: return "ns";
    case Strategy::Random: return "random";
    case Strategy::MultiBD: return "multibd";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from(const std::string& name) {
  if (name == "e2r") return Strategy::E2R;
  if (name == "ns") return Strategy::NS;
  if (name == "random") return Strategy::Random;
  if (name == "multibd") return Strategy::MultiBD;
  return std::nullopt;
}

bool is_impatience_gen(int g, int period) {
  if (period <= 0) throw std::invalid_argument("period must be positive");
  return g >= 1 && g % period == 0;
}

bool is_regenerate_gen(int g, int period) { return is_impatience_gen(g, period); }

std::vector<Individual> get_successes(const std::vector<Individual>& offspring) {
  std::vector<Individual> out;
  for (const Individual& ind : offspring) {
    if (ind.success) out.push_back(ind);
  }
  return out;
}

namespace {

struct EvalBatch {
  std::vector<Individual> individuals;
  std::vector<Trajectory> trajectories;
};

// Ranks the current population by the mean of its max-normalized valid slot
// scores; used to top regenerated populations back up to mu.
std::vector<std::size_t> overall_novelty_order(const std::vector<Individual>& pop) {
  std::array<double, slot::count> norm{};
  for (const Individual& ind : pop) {
    for (int s = 0; s < slot::count; ++s) {
      if (ind.novelty_valid[s]) norm[s] = std::max(norm[s], ind.novelty[s]);
    }
  }
  std::vector<double> score(pop.size(), 0.0);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    double sum = 0.0;
    int used = 0;
    for (int s = 0; s < slot::count; ++s) {
      if (!pop[i].novelty_valid[s]) continue;
      sum += norm[s] > 0.0 ? pop[i].novelty[s] / norm[s] : 0.0;
      ++used;
    }
    score[i] = used > 0 ? sum / used : -1.0;
  }
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  return order;
}

class Engine {
 public:
  Engine(const RunConfig& cfg, Strategy strategy, const RunHooks* hooks)
      : cfg_(cfg),
        strategy_(strategy),
        hooks_(hooks),
        params_(MutationParams::from(cfg)),
        grid_(workspace_grid(cfg.env)),
        surface_(object_surface(cfg.env)) {}

  RunResult execute() {
    population_ = evaluate(fresh_genomes(0), 0, {}, MutationKind::Init).individuals;
    int g = 0;
    while (rollouts_ < cfg_.budget_rollouts) {
      ++g;
      step_generation(g);
    }
    audit();
    result_.novelty_archive = std::move(archive_);
    return std::move(result_);
  }

 private:
  std::vector<Genome> fresh_genomes(int generation) {
    auto rng = rng_stream(cfg_.seed, streams::init, static_cast<std::uint64_t>(generation));
    return init_pop(cfg_.mu, cfg_.env.joints(), rng);
  }

  EvalBatch evaluate(const std::vector<Genome>& genomes, int generation,
                     const std::vector<std::optional<std::uint64_t>>& parents,
                     MutationKind default_kind,
                     const std::vector<MutationKind>* kinds = nullptr) {
    EvalBatch batch;
    batch.individuals.resize(genomes.size());
    batch.trajectories.resize(genomes.size());
    const std::uint64_t id_base = next_id_;
    next_id_ += genomes.size();
    parallel_for(genomes.size(), [&](std::size_t i) {
      batch.trajectories[i] = rollout(genomes[i], cfg_.env);
      Individual& ind = batch.individuals[i];
      const Trajectory& tr = batch.trajectories[i];
      ind.id = id_base + i;
      ind.genome = genomes[i];
      ind.desc = extract_descriptors(tr, cfg_.env.episode_steps);
      ind.success = tr.success;
      ind.summary = {tr.t_touch, tr.grasp_established_at, tr.first_contact};
      ind.meta.generation = generation;
      ind.meta.parent = parents.empty() ? std::nullopt : parents[i];
      ind.meta.kind = kinds ? (*kinds)[i] : default_kind;
    });
    rollouts_ += static_cast<long long>(genomes.size());
    return batch;
  }

  void step_generation(int g) {
    const auto started = std::chrono::steady_clock::now();
    GenerationLog log;
    log.generation = g;

    if (strategy_ == Strategy::E2R && result_.repertoire.empty() &&
        is_impatience_gen(g, cfg_.impatience_period)) {
      population_ = evaluate(fresh_genomes(g), g, {}, MutationKind::Init).individuals;
      if (cfg_.impatience_clears_archive) archive_.entries.clear();
      log.impatience_fired = true;
    }
    if (strategy_ == Strategy::E2R && !result_.repertoire.empty() &&
        is_regenerate_gen(g, cfg_.regenerate_period)) {
      regenerate();
      log.regenerated = true;
    }

    // Parents, mutation, evaluation.
    auto sample_rng = rng_stream(cfg_.seed, streams::parent_sample, g);
    const auto parent_idx =
        sample_indices(population_.size(), static_cast<std::size_t>(cfg_.lambda), sample_rng);
    std::vector<Genome> parent_genomes;
    std::vector<std::optional<std::uint64_t>> parent_ids;
    std::vector<std::optional<MutationKind>> forced;
    parent_genomes.reserve(parent_idx.size());
    for (std::size_t idx : parent_idx) {
      Individual& parent = population_[idx];
      parent_genomes.push_back(parent.genome);
      parent_ids.push_back(parent.id);
      forced.push_back(strategy_ == Strategy::E2R ? parent.pending_hint : std::nullopt);
      parent.pending_hint.reset();
    }
    std::vector<Genome> offspring_genomes(parent_genomes.size());
    std::vector<MutationKind> kinds(parent_genomes.size(), MutationKind::Uniform);
    if (strategy_ == Strategy::E2R) {
      auto mutated = mutate_er(parent_genomes, cfg_.p_explore, cfg_.p_refine, params_, cfg_.seed,
                               static_cast<std::uint64_t>(g), forced);
      for (std::size_t i = 0; i < mutated.size(); ++i) {
        offspring_genomes[i] = std::move(mutated[i].genome);
        kinds[i] = mutated[i].kind;
      }
    } else {
      for (std::size_t i = 0; i < parent_genomes.size(); ++i) {
        auto rng = rng_stream(cfg_.seed, streams::mutate, static_cast<std::uint64_t>(g), i);
        offspring_genomes[i] = mutate_uniform(parent_genomes[i], cfg_.sigma_uniform, rng);
      }
    }
    EvalBatch offspring = evaluate(offspring_genomes, g, parent_ids, MutationKind::Uniform, &kinds);

    // Harvest successes and fold their trajectories into the coverage state.
    int harvested = 0;
    for (std::size_t i = 0; i < offspring.individuals.size(); ++i) {
      if (!offspring.individuals[i].success) continue;
      result_.repertoire.entries.push_back(offspring.individuals[i]);
      grid_.mark_trajectory(offspring.trajectories[i]);
      if (!offspring.trajectories[i].first_contact) {
        throw std::logic_error("successful rollout without a first contact");
      }
      surface_.mark(*offspring.trajectories[i].first_contact);
      ++harvested;
    }
    log.successes_gen = harvested;
    if (hooks_ && hooks_->after_harvest) hooks_->after_harvest(g, result_.repertoire);

    // Novelty over population plus offspring, against the archive as well.
    std::vector<Individual> pool = population_;
    pool.insert(pool.end(), offspring.individuals.begin(), offspring.individuals.end());
    const ReferenceSet refs = build_reference_set(pool, archive_);
    update_novelty(pool, refs, cfg_.k_neighbors);

    // Archive additions come from the offspring only.
    auto archive_rng = rng_stream(cfg_.seed, streams::archive_sample, g);
    const std::size_t n_add =
        std::min<std::size_t>(cfg_.archive_additions, offspring.individuals.size());
    for (std::size_t i : sample_indices(offspring.individuals.size(), n_add, archive_rng)) {
      archive_.entries.push_back({offspring.individuals[i].desc, offspring.individuals[i].id});
    }

    switch (strategy_) {
      case Strategy::E2R:
      case Strategy::MultiBD:
        population_ = multi_bc_sel(pool, static_cast<std::size_t>(cfg_.mu));
        break;
      case Strategy::NS:
        population_ = ns_select(pool, refs, static_cast<std::size_t>(cfg_.mu), cfg_.k_neighbors);
        break;
      case Strategy::Random: {
        auto rng = rng_stream(cfg_.seed, streams::selection, g);
        population_ = random_select(pool, static_cast<std::size_t>(cfg_.mu), rng);
        break;
      }
    }

    log.rollouts = rollouts_;
    log.successes_total = static_cast<long long>(result_.repertoire.size());
    log.archive_size = static_cast<long long>(archive_.size());
    log.approach_coverage = grid_.ratio();
    log.grasp_coverage = surface_.ratio();
    log.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result_.logs.push_back(log);
  }

  void regenerate() {
    // Refresh archived novelty against the current population and archive
    // before ranking, then rebuild the population from the picks.
    const ReferenceSet refs = build_reference_set(population_, archive_);
    SuccessArchive scored = result_.repertoire;
    parallel_for(scored.entries.size(), [&](std::size_t i) {
      score_novelty(scored.entries[i], refs, cfg_.k_neighbors);
    });
    const auto picks = regenerate_select(scored, static_cast<std::size_t>(cfg_.mu));
    std::vector<Individual> next;
    next.reserve(cfg_.mu);
    for (const RegenPick& pick : picks) {
      Individual ind = pick.individual;
      ind.pending_hint = pick.hint;
      next.push_back(std::move(ind));
    }
    if (next.size() < static_cast<std::size_t>(cfg_.mu)) {
      for (std::size_t idx : overall_novelty_order(population_)) {
        if (next.size() == static_cast<std::size_t>(cfg_.mu)) break;
        next.push_back(population_[idx]);
      }
    }
    population_ = std::move(next);
  }

  void audit() {
    const std::size_t n = result_.repertoire.size();
    std::vector<char> ok(n, 1);
    parallel_for(n, [&](std::size_t i) {
      ok[i] = rollout(result_.repertoire.entries[i].genome, cfg_.env).success ? 1 : 0;
    });
    for (std::size_t i = 0; i < n; ++i) {
      if (!ok[i]) result_.audit_failures.push_back(i);
    }
  }

  const RunConfig& cfg_;
  Strategy strategy_;
  const RunHooks* hooks_;
  MutationParams params_;
  CoverageGrid grid_;
  SurfaceDiscretization surface_;
  std::vector<Individual> population_;
  NoveltyArchive archive_;
  RunResult result_;
  std::uint64_t next_id_ = 0;
  long long rollouts_ = 0;
};

}  // namespace

RunResult run(const RunConfig& cfg, Strategy strategy, const RunHooks* hooks) {
  const ValidationReport report = validate_config(cfg);
  if (!report.ok()) throw std::invalid_argument("invalid config: " + report.to_string());
  return Engine(cfg, strategy, hooks).execute();
}

}  // namespace e2r
