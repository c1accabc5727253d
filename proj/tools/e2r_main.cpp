#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "e2r/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Diverse-grasp repertoire toolkit: evolve, replay and measure open-loop "
               "grasping trajectories for a planar arm"};
  app.require_subcommand(1);

  e2r::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run one strategy on one seed");
  run->add_option("--config", run_opt.config_path, "Config file (defaults used when omitted)");
  run->add_option("--strategy", run_opt.strategy, "e2r, ns, random or multibd")
      ->default_val("e2r");
  run->add_option("--seed", run_opt.seed, "Seed override");
  run->add_option("--budget", run_opt.budget, "Rollout budget override");
  run->add_option("--out", run_opt.out_dir, "Output directory")->required();

  e2r::BatchOptions batch_opt;
  CLI::App* batch = app.add_subcommand("batch", "Run strategy x seed pairs and aggregate");
  batch->add_option("--config", batch_opt.config_path, "Config file (defaults used when omitted)");
  batch->add_option("--strategy", batch_opt.strategies, "Strategies (repeatable)")
      ->default_val(std::vector<std::string>{"e2r"});
  batch->add_option("--seeds", batch_opt.seeds, "Seed list")->required();
  batch->add_option("--budget", batch_opt.budget, "Rollout budget override");
  batch->add_option("--out", batch_opt.out_dir, "Output directory")->required();

  e2r::ReplayCliOptions replay_opt;
  CLI::App* replay = app.add_subcommand("replay", "Replay one stored individual");
  replay->add_option("repertoire", replay_opt.repertoire, "Repertoire file")->required();
  replay->add_option("--config", replay_opt.config_path,
                     "Config the repertoire was generated with");
  replay->add_option("--index", replay_opt.index, "Entry position in the file");
  replay->add_option("--id", replay_opt.id, "Entry id (alternative to --index)");
  replay->add_option("--out", replay_opt.out_dir, "Output directory")->required();
  replay->add_flag("--verify", replay_opt.verify,
                   "Exit nonzero when the replayed outcome differs from the stored one");
  replay->add_flag("--svg", replay_opt.svg, "Render SVG frames");
  replay->add_option("--frame-stride", replay_opt.frame_stride, "Steps between SVG frames")
      ->default_val(20);

  e2r::MetricsOptions metrics_opt;
  CLI::App* metrics = app.add_subcommand("metrics", "Recompute coverage from a repertoire");
  metrics->add_option("repertoire", metrics_opt.repertoire, "Repertoire file")->required();
  metrics->add_option("--config", metrics_opt.config_path,
                      "Config the repertoire was generated with");
  metrics->add_option("--out", metrics_opt.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : e2r::exit_code::config;
  }

  if (run->parsed()) return e2r::cmd_run(run_opt, std::cout, std::cerr);
  if (batch->parsed()) return e2r::cmd_batch(batch_opt, std::cout, std::cerr);
  if (replay->parsed()) return e2r::cmd_replay(replay_opt, std::cout, std::cerr);
  if (metrics->parsed()) return e2r::cmd_metrics(metrics_opt, std::cout, std::cerr);
  return e2r::exit_code::config;
}
