#include "e2r/commands.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "e2r/engine.hpp"
#include "e2r/env.hpp"
#include "e2r/io.hpp"
#include "e2r/metrics.hpp"
#include "e2r/parallel.hpp"

#include "json.hpp"

namespace e2r {

namespace {

namespace fs = std::filesystem;

RunConfig load_config(const fs::path& path) {
  if (path.empty()) return {};
  return read_config(path);
}

Strategy parse_strategy(const std::string& name) {
  const auto s = strategy_from(name);
  if (!s) {
    throw std::runtime_error("unknown strategy \"" + name +
                             "\" (expected e2r, ns, random or multibd)");
  }
  return *s;
}

void require_valid(const RunConfig& cfg) {
  const ValidationReport report = validate_config(cfg);
  if (!report.ok()) throw std::runtime_error("invalid config:\n" + report.to_string());
}

int report(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << "\n";
  return code;
}

// Shared by run and batch: executes one experiment and drops its artifacts.
RunResult run_pair(const RunConfig& cfg, Strategy strategy, const fs::path& dir) {
  RunResult result = run(cfg, strategy);
  fs::create_directories(dir);
  write_config(cfg, dir / "config.json");
  write_repertoire(result.repertoire, cfg.env, dir / "repertoire.jsonl");
  write_metrics(result.logs, dir / "metrics.csv");
  return result;
}

void check_env_hash(const RepertoireFile& file, const EnvConfig& env, const fs::path& path) {
  const std::uint64_t want = config_hash(env);
  if (file.env_hash != want) {
    throw std::runtime_error("environment mismatch: " + path.string() +
                             " was produced under a different environment (refusing to replay; "
                             "pass the config the repertoire was generated with)");
  }
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  Strategy strategy{};
  try {
    cfg = load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.budget) cfg.budget_rollouts = *opt.budget;
    strategy = parse_strategy(opt.strategy);
    require_valid(cfg);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::config);
  }
  try {
    const RunResult result = run_pair(cfg, strategy, opt.out_dir);
    const GenerationLog& last = result.logs.empty() ? GenerationLog{} : result.logs.back();
    out << "run strategy=" << to_string(strategy) << " seed=" << cfg.seed
        << " rollouts=" << last.rollouts << " generations=" << result.logs.size()
        << " successes=" << result.repertoire.size()
        << " archive_size=" << result.novelty_archive.size()
        << " approach_coverage=" << format_double(last.approach_coverage)
        << " grasp_coverage=" << format_double(last.grasp_coverage)
        << " out=" << opt.out_dir.string() << "\n";
  } catch (const std::exception& e) {
    return report(err, e, exit_code::io);
  }
  return exit_code::ok;
}

int cmd_batch(const BatchOptions& opt, std::ostream& out, std::ostream& err) {
  RunConfig base;
  std::vector<Strategy> strategies;
  try {
    base = load_config(opt.config_path);
    if (opt.budget) base.budget_rollouts = *opt.budget;
    if (opt.strategies.empty()) throw std::runtime_error("need at least one strategy");
    if (opt.seeds.empty()) throw std::runtime_error("need at least one seed");
    for (const std::string& name : opt.strategies) strategies.push_back(parse_strategy(name));
    require_valid(base);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::config);
  }

  int failed = 0;
  std::vector<std::pair<std::string, AggregateSummary>> summaries;
  try {
    fs::create_directories(opt.out_dir);
    for (Strategy strategy : strategies) {
      std::vector<std::vector<GenerationLog>> per_seed;
      for (std::uint64_t seed : opt.seeds) {
        RunConfig cfg = base;
        cfg.seed = seed;
        const fs::path dir =
            opt.out_dir / (to_string(strategy) + "_s" + std::to_string(seed));
        try {
          per_seed.push_back(run_pair(cfg, strategy, dir).logs);
        } catch (const std::exception& e) {
          err << "pair strategy=" << to_string(strategy) << " seed=" << seed
              << " failed: " << e.what() << "\n";
          ++failed;
        }
      }
      if (!per_seed.empty()) summaries.emplace_back(to_string(strategy), aggregate_runs(per_seed));
    }
    nlohmann::ordered_json j;
    for (const auto& [name, summary] : summaries) {
      nlohmann::ordered_json s;
      s["seeds"] = summary.seeds;
      s["success_rate"] = summary.success_rate;
      nlohmann::ordered_json points = nlohmann::ordered_json::array();
      const auto stat_json = [](const Stat& st) {
        nlohmann::ordered_json o;
        o["mean"] = st.mean;
        o["ci_halfwidth"] =
            st.ci_halfwidth ? nlohmann::ordered_json(*st.ci_halfwidth) : nlohmann::ordered_json();
        return o;
      };
      for (const CheckpointStats& cp : summary.points) {
        nlohmann::ordered_json p;
        p["rollouts"] = cp.rollouts;
        p["successes"] = stat_json(cp.successes);
        p["approach_coverage"] = stat_json(cp.approach);
        p["grasp_coverage"] = stat_json(cp.grasp);
        points.push_back(std::move(p));
      }
      s["checkpoints"] = std::move(points);
      j[name] = std::move(s);
    }
    const fs::path summary_path = opt.out_dir / "summary.json";
    std::ofstream file(summary_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + summary_path.string() + " for writing");
    file << j.dump(2) << "\n";
    file.flush();
    if (!file) throw std::runtime_error("write failed for " + summary_path.string());
    out << "batch strategies=" << strategies.size() << " seeds=" << opt.seeds.size()
        << " pairs=" << strategies.size() * opt.seeds.size() << " failed=" << failed
        << " summary=" << summary_path.string() << "\n";
  } catch (const std::exception& e) {
    return report(err, e, exit_code::io);
  }
  return failed == 0 ? exit_code::ok : exit_code::io;
}

int cmd_replay(const ReplayCliOptions& opt, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opt.config_path);
    require_valid(cfg);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::config);
  }
  RepertoireFile file;
  try {
    file = read_repertoire(opt.repertoire);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::io);
  }
  std::size_t index = 0;
  try {
    check_env_hash(file, cfg.env, opt.repertoire);
    const std::size_t n = file.archive.size();
    if (opt.index && opt.id) throw std::runtime_error("pass either --index or --id, not both");
    if (opt.index) {
      if (*opt.index < 0 || static_cast<std::size_t>(*opt.index) >= n) {
        throw std::runtime_error("index " + std::to_string(*opt.index) +
                                 " out of range (valid range is [0, " + std::to_string(n) + "))");
      }
      index = static_cast<std::size_t>(*opt.index);
    } else if (opt.id) {
      const auto it = std::find_if(file.archive.entries.begin(), file.archive.entries.end(),
                                   [&](const Individual& ind) { return ind.id == *opt.id; });
      if (it == file.archive.entries.end()) {
        throw std::runtime_error("no entry with id " + std::to_string(*opt.id));
      }
      index = static_cast<std::size_t>(it - file.archive.entries.begin());
    } else {
      throw std::runtime_error("select an entry with --index or --id");
    }
  } catch (const std::exception& e) {
    return report(err, e, exit_code::config);
  }

  const Individual& stored = file.archive.entries[index];
  Trajectory traj;
  fs::path trace;
  try {
    fs::create_directories(opt.out_dir);
    trace = opt.out_dir / ("replay_" + std::to_string(index) + ".csv");
    ReplayOptions ropts;
    ropts.svg = opt.svg;
    ropts.frame_stride = opt.frame_stride;
    traj = replay_trace(stored.genome, cfg.env, trace, ropts);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::io);
  }

  const bool match = traj.success == stored.success;
  out << "replay index=" << index << " id=" << stored.id
      << " stored_success=" << (stored.success ? "true" : "false")
      << " replay_success=" << (traj.success ? "true" : "false")
      << " match=" << (match ? "true" : "false") << " trace=" << trace.string() << "\n";
  if (opt.verify && !match) {
    err << "error: replayed outcome differs from the stored one\n";
    return exit_code::verify;
  }
  return exit_code::ok;
}

int cmd_metrics(const MetricsOptions& opt, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opt.config_path);
    require_valid(cfg);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::config);
  }
  RepertoireFile file;
  try {
    file = read_repertoire(opt.repertoire);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::io);
  }
  try {
    check_env_hash(file, cfg.env, opt.repertoire);
  } catch (const std::exception& e) {
    return report(err, e, exit_code::config);
  }

  try {
    const std::size_t n = file.archive.size();
    std::vector<Trajectory> replays(n);
    parallel_for(n, [&](std::size_t i) {
      replays[i] = rollout(file.archive.entries[i].genome, cfg.env);
    });
    std::vector<Trajectory> successes;
    for (Trajectory& tr : replays) {
      if (tr.success) successes.push_back(std::move(tr));
    }
    const double ac = approach_coverage(successes, workspace_grid(cfg.env));
    const double gc = grasp_coverage(successes, object_surface(cfg.env));
    fs::create_directories(opt.out_dir);
    const fs::path coverage_path = opt.out_dir / "coverage.csv";
    std::ofstream cov(coverage_path, std::ios::binary);
    if (!cov) throw std::runtime_error("cannot open " + coverage_path.string() + " for writing");
    cov << "entries,successes,approach_coverage,grasp_coverage\n"
        << n << ',' << successes.size() << ',' << format_double(ac) << ',' << format_double(gc)
        << "\n";
    cov.flush();
    if (!cov) throw std::runtime_error("write failed for " + coverage_path.string());
    out << "metrics entries=" << n << " successes=" << successes.size()
        << " approach_coverage=" << format_double(ac) << " grasp_coverage=" << format_double(gc)
        << " out=" << coverage_path.string() << "\n";
  } catch (const std::exception& e) {
    return report(err, e, exit_code::io);
  }
  return exit_code::ok;
}

}  // namespace e2r
