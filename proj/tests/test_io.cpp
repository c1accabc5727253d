#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "e2r/config.hpp"
#include "e2r/io.hpp"
#include "e2r/model.hpp"

using namespace e2r;
namespace fs = std::filesystem;

namespace {

struct TmpDir {
  fs::path path;
  TmpDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("e2r_io_test_" + std::to_string(++counter));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

Individual sample_individual(std::uint64_t id) {
  Individual ind;
  ind.id = id;
  ind.genome = Genome{{0.123456789012345, -0.5, 1.0, -1.0, 0.0, 0.25, 0.3, -0.125,
                       0.9999999999999999, 0.1}};
  ind.desc.object_final = {0.51, 0.17};
  ind.desc.touch_pos = {0.43, 0.08};
  ind.desc.touch_angle = -1.5707963267948966;
  ind.desc.mid_pos = {0.1, 0.9};
  ind.desc.mid_angle = 3.0;
  ind.desc.eligible = {true, true, true, true, true};
  ind.novelty = {0.1, 0.2, 0.3, 0.4, 1.0 / 3.0};
  ind.novelty_valid = {true, true, false, true, true};
  ind.success = true;
  ind.summary.t_touch = 83;
  ind.summary.grasp_step = 139;
  ind.summary.first_contact = Vec2{0.507919, 0.0792083};
  ind.meta.generation = 12;
  ind.meta.parent = 431;
  ind.meta.kind = MutationKind::Refine;
  ind.pending_hint = MutationKind::Explore;
  return ind;
}

// As produced by the grasping episode test fixture; exercises the replay path.
Genome grasp_fixture() {
  return Genome{{-0.086388861470371683, 0.46157694334561938, -0.87518808187524766,
                 -0.17191125789378131, 0.49668421205273888, -0.82477295415895768,
                 -0.025791653799708887, 0.41614007166920453, -0.89034841786949559,
                 0.47777777777777786}};
}

}  // namespace

TEST_CASE("format_double writes the shortest round-trip form") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.07) == "0.07");
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-17, 3.141592653589793, -0.30000000000000004,
                   1234567.891011, -7.0, 5e300, -2.2250738585072014e-308}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);  // bit-exact reparse
  }
}

TEST_CASE("environment hashes change with any physical parameter") {
  const EnvConfig base;
  CHECK(config_hash(base) == config_hash(EnvConfig{}));

  auto differs = [&](auto mutate) {
    EnvConfig env;
    mutate(env);
    return config_hash(env) != config_hash(base);
  };
  CHECK(differs([](EnvConfig& e) { e.episode_steps = 199; }));
  CHECK(differs([](EnvConfig& e) { e.link_lengths[2] = 0.21; }));
  CHECK(differs([](EnvConfig& e) { e.joint_limits[0][1] = 3.0; }));
  CHECK(differs([](EnvConfig& e) { e.base.y = 0.26; }));
  CHECK(differs([](EnvConfig& e) { e.rest_config[0] = 0.0; }));
  CHECK(differs([](EnvConfig& e) { e.gripper.max_opening = 0.13; }));
  CHECK(differs([](EnvConfig& e) { e.gripper.closure_speed = 0.005; }));
  CHECK(differs([](EnvConfig& e) { e.object.x = 0.55; }));
  CHECK(differs([](EnvConfig& e) { e.object.shape = ShapeKind::Box; }));
  CHECK(differs([](EnvConfig& e) { e.object.radius = 0.05; }));
  CHECK(differs([](EnvConfig& e) { e.contact_tol = 2e-3; }));
  CHECK(differs([](EnvConfig& e) { e.friction = 0.4; }));
  CHECK(differs([](EnvConfig& e) { e.lift_height = 0.2; }));
  CHECK(differs([](EnvConfig& e) { e.coverage_cell = 0.05; }));
  CHECK(differs([](EnvConfig& e) { e.surface_cell = 0.02; }));
}

TEST_CASE("config round-trips through its JSON form") {
  RunConfig cfg;
  cfg.mu = 64;
  cfg.lambda = 32;
  cfg.budget_rollouts = 4321;
  cfg.p_explore = 0.25;
  cfg.p_refine = 0.75;
  cfg.impatience_period = 77;
  cfg.regenerate_period = 9;
  cfg.archive_additions = 8;
  cfg.k_neighbors = 7;
  cfg.seed = 123456789012345ull;
  cfg.sigma_big = 0.5;
  cfg.sigma_small = 0.001;
  cfg.sigma_uniform = 0.12;
  cfg.impatience_clears_archive = false;
  cfg.env.episode_steps = 150;
  cfg.env.object.shape = ShapeKind::Box;
  cfg.env.object.half_extents = {0.05, 0.01};
  cfg.env.object.x = 0.61;
  cfg.env.friction = 0.8;

  const std::string text = config_to_json(cfg);
  const RunConfig back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.seed == cfg.seed);
  CHECK(back.env.object.shape == ShapeKind::Box);
  CHECK(back.env.object.half_extents == cfg.env.object.half_extents);

  // defaults survive the round trip too
  CHECK(config_to_json(config_from_json(config_to_json(RunConfig{}))) ==
        config_to_json(RunConfig{}));
}

TEST_CASE("config files: partial keys fill with defaults, unknown keys are fatal") {
  TmpDir tmp;

  SUBCASE("write then read is the identity") {
    RunConfig cfg;
    cfg.seed = 9;
    cfg.env.object.x = 0.43;
    write_config(cfg, tmp / "config.json");
    const RunConfig back = read_config(tmp / "config.json");
    CHECK(config_to_json(back) == config_to_json(cfg));
  }
  SUBCASE("missing keys default") {
    std::ofstream(tmp / "partial.json") << R"({"mu": 42, "env": {"episode_steps": 100}})";
    const RunConfig cfg = read_config(tmp / "partial.json");
    CHECK(cfg.mu == 42);
    CHECK(cfg.env.episode_steps == 100);
    CHECK(cfg.lambda == RunConfig{}.lambda);
    CHECK(cfg.env.friction == RunConfig{}.env.friction);
  }
  SUBCASE("unknown keys name themselves") {
    std::ofstream(tmp / "typo.json") << R"({"muu": 42})";
    CHECK_THROWS_WITH_AS(read_config(tmp / "typo.json"), doctest::Contains("muu"),
                         std::runtime_error);
    std::ofstream(tmp / "nested.json") << R"({"env": {"frictionn": 0.5}})";
    CHECK_THROWS_WITH_AS(read_config(tmp / "nested.json"), doctest::Contains("frictionn"),
                         std::runtime_error);
  }
  SUBCASE("missing files name themselves") {
    CHECK_THROWS_WITH_AS(read_config(tmp / "absent.json"), doctest::Contains("absent.json"),
                         std::runtime_error);
  }
  SUBCASE("unparseable text is fatal") {
    std::ofstream(tmp / "broken.json") << "{not json";
    CHECK_THROWS_AS(read_config(tmp / "broken.json"), std::runtime_error);
  }
  SUBCASE("bad shape names are fatal") {
    std::ofstream(tmp / "shape.json") << R"({"env": {"object": {"shape": "sphere"}}})";
    CHECK_THROWS_WITH_AS(read_config(tmp / "shape.json"), doctest::Contains("sphere"),
                         std::runtime_error);
  }
}

TEST_CASE("repertoire files round-trip bit for bit") {
  TmpDir tmp;
  const EnvConfig env;

  SUBCASE("an empty repertoire is a bare header") {
    write_repertoire({}, env, tmp / "empty.jsonl");
    const std::string text = slurp(tmp / "empty.jsonl");
    CHECK(line_count(text) == 1);
    const auto file = read_repertoire(tmp / "empty.jsonl");
    CHECK(file.archive.size() == 0);
    CHECK(file.env_hash == config_hash(env));
    CHECK(file.joints == 3);
  }
  SUBCASE("entries reproduce exactly, including every gene bit") {
    SuccessArchive archive;
    archive.entries.push_back(sample_individual(1));
    auto second = sample_individual(2);
    second.summary.first_contact.reset();
    second.meta.parent.reset();
    second.pending_hint.reset();
    second.desc.eligible = {true, false, false, true, true};
    second.novelty_valid = {true, false, false, false, true};
    archive.entries.push_back(second);
    archive.entries.push_back(sample_individual(77));

    write_repertoire(archive, env, tmp / "rep.jsonl");
    CHECK(line_count(slurp(tmp / "rep.jsonl")) == 4);
    const auto file = read_repertoire(tmp / "rep.jsonl");
    REQUIRE(file.archive.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(file.archive.entries[i] == archive.entries[i]);
    CHECK(file.archive.entries[0].genome[0] == 0.123456789012345);

    // writing the same archive twice produces identical bytes
    write_repertoire(archive, env, tmp / "rep2.jsonl");
    CHECK(slurp(tmp / "rep.jsonl") == slurp(tmp / "rep2.jsonl"));
  }
  SUBCASE("a malformed record reports its line number") {
    SuccessArchive archive;
    archive.entries.push_back(sample_individual(1));
    write_repertoire(archive, env, tmp / "rep.jsonl");
    std::ofstream(tmp / "rep.jsonl", std::ios::app) << "{this is not json\n";
    CHECK_THROWS_WITH_AS(read_repertoire(tmp / "rep.jsonl"), doctest::Contains("line 3"),
                         std::runtime_error);
  }
  SUBCASE("future versions are refused") {
    std::ofstream(tmp / "future.jsonl")
        << R"({"format":"grasp-repertoire","version":2,"env_hash":"0000000000000000","joints":3})"
        << "\n";
    CHECK_THROWS_WITH_AS(read_repertoire(tmp / "future.jsonl"), doctest::Contains("incompatible"),
                         std::runtime_error);
  }
  SUBCASE("foreign files are refused") {
    std::ofstream(tmp / "foreign.jsonl") << R"({"format":"something-else","version":1})" << "\n";
    CHECK_THROWS_AS(read_repertoire(tmp / "foreign.jsonl"), std::runtime_error);
    std::ofstream(tmp / "empty.jsonl") << "";
    CHECK_THROWS_WITH_AS(read_repertoire(tmp / "empty.jsonl"), doctest::Contains("header"),
                         std::runtime_error);
  }
  SUBCASE("a genome that contradicts the header joint count is refused") {
    SuccessArchive archive;
    Individual ind;
    ind.genome = Genome{std::vector<double>(7, 0.0)};  // a two-joint genome
    archive.entries.push_back(ind);
    write_repertoire(archive, env, tmp / "bad.jsonl");
    CHECK_THROWS_WITH_AS(read_repertoire(tmp / "bad.jsonl"), doctest::Contains("genes"),
                         std::runtime_error);
  }
}

TEST_CASE("metrics tables round-trip with wall time zeroed") {
  TmpDir tmp;

  SUBCASE("no generations leaves just the header") {
    write_metrics({}, tmp / "metrics.csv");
    const std::string text = slurp(tmp / "metrics.csv");
    CHECK(line_count(text) == 1);
    CHECK(text.find("generation") == 0);
    CHECK(read_metrics(tmp / "metrics.csv").empty());
  }
  SUBCASE("full-precision round trip") {
    std::vector<GenerationLog> logs;
    for (int g = 1; g <= 3; ++g) {
      GenerationLog log;
      log.generation = g;
      log.rollouts = 100 + 50LL * g;
      log.successes_total = g * g;
      log.archive_size = 10 * g;
      log.approach_coverage = g / 3.0;
      log.grasp_coverage = g / 7.0;
      log.wall_time_s = 1.5 * g;  // measured, but not persisted
      logs.push_back(log);
    }
    write_metrics(logs, tmp / "metrics.csv");
    const auto back = read_metrics(tmp / "metrics.csv");
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(back[i].generation == logs[i].generation);
      CHECK(back[i].rollouts == logs[i].rollouts);
      CHECK(back[i].successes_total == logs[i].successes_total);
      CHECK(back[i].archive_size == logs[i].archive_size);
      CHECK(back[i].approach_coverage == logs[i].approach_coverage);  // bit-exact
      CHECK(back[i].grasp_coverage == logs[i].grasp_coverage);
      CHECK(back[i].wall_time_s == 0.0);
    }
    // the file itself ends every row with a zero wall time
    std::istringstream in(slurp(tmp / "metrics.csv"));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) CHECK(line.substr(line.rfind(',')) == ",0");
  }
  SUBCASE("ragged rows are fatal") {
    std::ofstream(tmp / "bad.csv")
        << "generation,rollouts,successes_total,archive_size,approach_coverage,grasp_coverage,"
           "wall_time_s\n1,150,0,10,0.0,0.0\n";
    CHECK_THROWS_WITH_AS(read_metrics(tmp / "bad.csv"), doctest::Contains("7 columns"),
                         std::runtime_error);
  }
  SUBCASE("missing files name themselves") {
    CHECK_THROWS_WITH_AS(read_metrics(tmp / "gone.csv"), doctest::Contains("gone.csv"),
                         std::runtime_error);
  }
}

TEST_CASE("aggregate summaries serialize missing intervals as null") {
  TmpDir tmp;
  AggregateSummary summary;
  summary.seeds = 1;
  summary.success_rate = 1.0;
  CheckpointStats cp;
  cp.rollouts = 150;
  cp.successes.mean = 2.0;
  cp.approach.mean = 0.25;
  cp.grasp.mean = 0.5;  // single seed: no ci anywhere
  summary.points.push_back(cp);

  write_summary(summary, tmp / "summary.json");
  const std::string text = slurp(tmp / "summary.json");
  CHECK(text.find("null") != std::string::npos);
  CHECK(text.find("\"seeds\": 1") != std::string::npos);

  write_summary(summary, tmp / "again.json");
  CHECK(slurp(tmp / "again.json") == text);  // byte-for-byte deterministic

  AggregateSummary multi = summary;
  multi.seeds = 2;
  multi.points[0].approach.ci_halfwidth = 0.196;
  write_summary(multi, tmp / "multi.json");
  CHECK(slurp(tmp / "multi.json").find("0.196") != std::string::npos);
}

TEST_CASE("replay traces record every step and the defining events") {
  TmpDir tmp;
  const EnvConfig env;
  const auto traj = replay_trace(grasp_fixture(), env, tmp / "trace.csv");
  CHECK(traj.success);

  const std::string text = slurp(tmp / "trace.csv");
  CHECK(line_count(text) == 201);  // header + one row per step
  CHECK(text.find("t,phase,") == 0);

  std::size_t touch = 0, close = 0, grasp = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    touch += line.find("touch") != std::string::npos;
    close += line.find("close") != std::string::npos;
    grasp += line.find("grasp") != std::string::npos;
  }
  CHECK(touch == 1);
  CHECK(close == 1);
  CHECK(grasp == 1);

  SUBCASE("snapshots land on the frame stride") {
    ReplayOptions opts;
    opts.svg = true;
    opts.frame_stride = 50;
    replay_trace(grasp_fixture(), env, tmp / "vis.csv", opts);
    for (int t : {0, 50, 100, 150}) {
      char name[32];
      std::snprintf(name, sizeof name, "vis_%04d.svg", t);
      const fs::path frame = tmp / name;
      REQUIRE(fs::exists(frame));
      const std::string svg = slurp(frame);
      CHECK(svg.find("<svg") != std::string::npos);
      CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
    }
    CHECK_FALSE(fs::exists(tmp / "vis_0200.svg"));
  }
  SUBCASE("a non-positive stride is rejected when rendering") {
    ReplayOptions opts;
    opts.svg = true;
    opts.frame_stride = 0;
    CHECK_THROWS_AS(replay_trace(grasp_fixture(), env, tmp / "x.csv", opts), std::runtime_error);
  }
}
