#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/metrics.hpp"
#include "e2r/model.hpp"

namespace e2r {

// FNV-1a over the canonical environment snapshot. Two configs hash equal iff a
// genome replays identically under both.
std::uint64_t config_hash(const EnvConfig& env);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

void write_config(const RunConfig& cfg, const std::filesystem::path& path);
// Missing keys fall back to defaults; unknown keys are rejected so typos fail loudly.
RunConfig read_config(const std::filesystem::path& path);

// Line-delimited records, one individual per line, preceded by a header line
// carrying the format version and the environment hash. Genes keep full
// precision, so read(write(x)) == x.
void write_repertoire(const SuccessArchive& archive, const EnvConfig& env,
                      const std::filesystem::path& path);

struct RepertoireFile {
  SuccessArchive archive;
  std::uint64_t env_hash = 0;
  int joints = 0;
};

RepertoireFile read_repertoire(const std::filesystem::path& path);

// Delimiter-separated table: generation, rollouts, successes_total,
// archive_size, approach_coverage, grasp_coverage, wall_time_s. Wall time is
// persisted as zero so the file is a pure function of (seed, config, strategy).
void write_metrics(const std::vector<GenerationLog>& logs, const std::filesystem::path& path);
std::vector<GenerationLog> read_metrics(const std::filesystem::path& path);

// Checkpoint table with empty cells where a confidence interval is undefined.
void write_summary(const AggregateSummary& summary, const std::filesystem::path& path);

struct ReplayOptions {
  bool svg = false;
  int frame_stride = 20;
};

// Re-runs the rollout and writes a per-step table (joints, end-effector pose,
// gripper width, object pose, contacts, phase, events). With svg set, renders a
// snapshot every frame_stride steps next to the trace file. Returns the
// trajectory so callers can check the outcome without replaying again.
Trajectory replay_trace(const Genome& g, const EnvConfig& env, const std::filesystem::path& path,
                        const ReplayOptions& opts = {});

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace e2r
