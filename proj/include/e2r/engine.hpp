#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/model.hpp"

namespace e2r {

enum class Strategy { E2R, NS, Random, MultiBD };

std::string to_string(Strategy s);
std::optional<Strategy> strategy_from(const std::string& name);

// True on generations g = period, 2*period, ... (never on generation 0).
bool is_impatience_gen(int g, int period);
bool is_regenerate_gen(int g, int period);

// Order-preserving filter of the successful individuals.
std::vector<Individual> get_successes(const std::vector<Individual>& offspring);

struct RunHooks {
  // Called right after each generation's successes were harvested. Used by tests
  // to observe or perturb the success archive mid-run.
  std::function<void(int generation, SuccessArchive&)> after_harvest;
};

struct RunResult {
  SuccessArchive repertoire;
  NoveltyArchive novelty_archive;
  std::vector<GenerationLog> logs;
  // Indices of repertoire entries whose replay no longer succeeds. Empty unless
  // someone injected entries from outside the evolutionary loop.
  std::vector<std::size_t> audit_failures;
};

// Runs the budgeted evolutionary loop for one strategy and seed. Everything is
// a pure function of (config, strategy): offspring are evaluated concurrently
// but merged in offspring order, so reruns reproduce identical results.
RunResult run(const RunConfig& cfg, Strategy strategy, const RunHooks* hooks = nullptr);

}  // namespace e2r
