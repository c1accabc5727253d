#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace e2r {

// One nonzero code per failure class so batch scripts can branch on them.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;  // unreadable/invalid config, bad flags, mismatched env hash
inline constexpr int io = 3;      // artifact read/write failures, malformed data files
inline constexpr int verify = 4;  // replayed outcome contradicts the stored one
}  // namespace exit_code

struct RunOptions {
  std::filesystem::path config_path;  // empty → built-in defaults
  std::string strategy = "e2r";
  std::optional<std::uint64_t> seed;
  std::optional<long long> budget;
  std::filesystem::path out_dir;
};

// Runs one (strategy, seed) experiment and writes config.json, repertoire.jsonl
// and metrics.csv into the output directory.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct BatchOptions {
  std::filesystem::path config_path;
  std::vector<std::string> strategies;
  std::vector<std::uint64_t> seeds;
  std::optional<long long> budget;
  std::filesystem::path out_dir;
};

// Runs every strategy x seed pair into its own subdirectory, then writes one
// cross-seed summary.json. Failing pairs are reported and skipped.
int cmd_batch(const BatchOptions& opt, std::ostream& out, std::ostream& err);

struct ReplayCliOptions {
  std::filesystem::path repertoire;
  std::filesystem::path config_path;
  std::optional<long long> index;   // position in the file
  std::optional<std::uint64_t> id;  // individual id, alternative to index
  std::filesystem::path out_dir;
  bool verify = false;  // exit nonzero when the replayed outcome differs
  bool svg = false;
  int frame_stride = 20;
};

// Replays one stored individual into a trace file (and optional SVG frames).
// Refuses to replay against an environment whose hash differs from the file's.
int cmd_replay(const ReplayCliOptions& opt, std::ostream& out, std::ostream& err);

struct MetricsOptions {
  std::filesystem::path repertoire;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
};

// Re-derives approach and grasp coverage by replaying every stored individual.
int cmd_metrics(const MetricsOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace e2r
