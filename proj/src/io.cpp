#include "e2r/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "json.hpp"

#include "e2r/env.hpp"

namespace e2r {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kRepertoireVersion = 1;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string() + " for reading");
  return in;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail("write failed for " + path.string());
}

ordered_json vec2_json(Vec2 v) { return ordered_json::array({v.x, v.y}); }

Vec2 vec2_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2) fail("expected a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string shape_to_string(ShapeKind s) { return s == ShapeKind::Circle ? "circle" : "box"; }

ShapeKind shape_from(const std::string& name) {
  if (name == "circle") return ShapeKind::Circle;
  if (name == "box") return ShapeKind::Box;
  fail("unknown object shape \"" + name + "\" (expected circle or box)");
}

void expect_keys(const ordered_json& j, std::initializer_list<std::string_view> keys,
                 const std::string& ctx) {
  if (!j.is_object()) fail(ctx + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view k : keys) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown key \"" + item.key() + "\" in " + ctx);
  }
}

ordered_json env_to_json(const EnvConfig& env) {
  ordered_json j;
  j["episode_steps"] = env.episode_steps;
  j["link_lengths"] = env.link_lengths;
  ordered_json limits = ordered_json::array();
  for (const auto& lim : env.joint_limits) limits.push_back(ordered_json::array({lim[0], lim[1]}));
  j["joint_limits"] = std::move(limits);
  j["base"] = vec2_json(env.base);
  j["rest_config"] = env.rest_config;
  j["gripper"] = {{"max_opening", env.gripper.max_opening},
                  {"finger_length", env.gripper.finger_length},
                  {"closure_speed", env.gripper.closure_speed}};
  j["object"] = {{"shape", shape_to_string(env.object.shape)},
                 {"radius", env.object.radius},
                 {"half_extents", vec2_json(env.object.half_extents)},
                 {"x", env.object.x}};
  j["contact_tol"] = env.contact_tol;
  j["friction"] = env.friction;
  j["lift_height"] = env.lift_height;
  j["coverage_cell"] = env.coverage_cell;
  j["surface_cell"] = env.surface_cell;
  return j;
}

EnvConfig env_from_json(const ordered_json& j) {
  expect_keys(j,
              {"episode_steps", "link_lengths", "joint_limits", "base", "rest_config", "gripper",
               "object", "contact_tol", "friction", "lift_height", "coverage_cell",
               "surface_cell"},
              "env");
  EnvConfig env;
  env.episode_steps = j.value("episode_steps", env.episode_steps);
  if (j.contains("link_lengths")) env.link_lengths = j["link_lengths"].get<std::vector<double>>();
  if (j.contains("joint_limits")) {
    env.joint_limits.clear();
    for (const auto& lim : j["joint_limits"]) {
      if (!lim.is_array() || lim.size() != 2) fail("joint_limits entries must be [lo, hi] pairs");
      env.joint_limits.push_back({lim[0].get<double>(), lim[1].get<double>()});
    }
  }
  if (j.contains("base")) env.base = vec2_from(j["base"]);
  if (j.contains("rest_config")) env.rest_config = j["rest_config"].get<std::vector<double>>();
  if (j.contains("gripper")) {
    const auto& g = j["gripper"];
    expect_keys(g, {"max_opening", "finger_length", "closure_speed"}, "env.gripper");
    env.gripper.max_opening = g.value("max_opening", env.gripper.max_opening);
    env.gripper.finger_length = g.value("finger_length", env.gripper.finger_length);
    env.gripper.closure_speed = g.value("closure_speed", env.gripper.closure_speed);
  }
  if (j.contains("object")) {
    const auto& o = j["object"];
    expect_keys(o, {"shape", "radius", "half_extents", "x"}, "env.object");
    if (o.contains("shape")) env.object.shape = shape_from(o["shape"].get<std::string>());
    env.object.radius = o.value("radius", env.object.radius);
    if (o.contains("half_extents")) env.object.half_extents = vec2_from(o["half_extents"]);
    env.object.x = o.value("x", env.object.x);
  }
  env.contact_tol = j.value("contact_tol", env.contact_tol);
  env.friction = j.value("friction", env.friction);
  env.lift_height = j.value("lift_height", env.lift_height);
  env.coverage_cell = j.value("coverage_cell", env.coverage_cell);
  env.surface_cell = j.value("surface_cell", env.surface_cell);
  return env;
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["mu"] = cfg.mu;
  j["lambda"] = cfg.lambda;
  j["budget_rollouts"] = cfg.budget_rollouts;
  j["p_explore"] = cfg.p_explore;
  j["p_refine"] = cfg.p_refine;
  j["impatience_period"] = cfg.impatience_period;
  j["regenerate_period"] = cfg.regenerate_period;
  j["archive_additions"] = cfg.archive_additions;
  j["k_neighbors"] = cfg.k_neighbors;
  j["seed"] = cfg.seed;
  j["sigma_big"] = cfg.sigma_big;
  j["sigma_small"] = cfg.sigma_small;
  j["sigma_uniform"] = cfg.sigma_uniform;
  j["impatience_clears_archive"] = cfg.impatience_clears_archive;
  j["env"] = env_to_json(cfg.env);
  return j;
}

RunConfig config_from(const ordered_json& j) {
  expect_keys(j,
              {"mu", "lambda", "budget_rollouts", "p_explore", "p_refine", "impatience_period",
               "regenerate_period", "archive_additions", "k_neighbors", "seed", "sigma_big",
               "sigma_small", "sigma_uniform", "impatience_clears_archive", "env"},
              "config");
  RunConfig cfg;
  cfg.mu = j.value("mu", cfg.mu);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.budget_rollouts = j.value("budget_rollouts", cfg.budget_rollouts);
  cfg.p_explore = j.value("p_explore", cfg.p_explore);
  cfg.p_refine = j.value("p_refine", cfg.p_refine);
  cfg.impatience_period = j.value("impatience_period", cfg.impatience_period);
  cfg.regenerate_period = j.value("regenerate_period", cfg.regenerate_period);
  cfg.archive_additions = j.value("archive_additions", cfg.archive_additions);
  cfg.k_neighbors = j.value("k_neighbors", cfg.k_neighbors);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.sigma_big = j.value("sigma_big", cfg.sigma_big);
  cfg.sigma_small = j.value("sigma_small", cfg.sigma_small);
  cfg.sigma_uniform = j.value("sigma_uniform", cfg.sigma_uniform);
  cfg.impatience_clears_archive =
      j.value("impatience_clears_archive", cfg.impatience_clears_archive);
  if (j.contains("env")) cfg.env = env_from_json(j["env"]);
  return cfg;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t hash_from_hex(const std::string& s) {
  std::uint64_t h = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), h, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail("malformed hash \"" + s + "\"");
  return h;
}

ordered_json optional_int(const std::optional<int>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json individual_json(const Individual& ind) {
  ordered_json j;
  j["id"] = ind.id;
  j["genome"] = ind.genome.genes;
  ordered_json d;
  d["object_final"] = vec2_json(ind.desc.object_final);
  d["touch_pos"] = vec2_json(ind.desc.touch_pos);
  d["touch_angle"] = ind.desc.touch_angle;
  d["mid_pos"] = vec2_json(ind.desc.mid_pos);
  d["mid_angle"] = ind.desc.mid_angle;
  d["eligible"] = ind.desc.eligible;
  j["descriptor"] = std::move(d);
  j["novelty"] = ind.novelty;
  j["novelty_valid"] = ind.novelty_valid;
  j["success"] = ind.success;
  ordered_json s;
  s["t_touch"] = optional_int(ind.summary.t_touch);
  s["grasp_step"] = optional_int(ind.summary.grasp_step);
  s["first_contact"] =
      ind.summary.first_contact ? vec2_json(*ind.summary.first_contact) : ordered_json(nullptr);
  j["summary"] = std::move(s);
  ordered_json m;
  m["generation"] = ind.meta.generation;
  m["parent"] = ind.meta.parent ? ordered_json(*ind.meta.parent) : ordered_json(nullptr);
  m["kind"] = to_string(ind.meta.kind);
  j["meta"] = std::move(m);
  j["hint"] = ind.pending_hint ? ordered_json(to_string(*ind.pending_hint)) : ordered_json(nullptr);
  return j;
}

MutationKind kind_from_checked(const std::string& name) {
  const auto k = mutation_kind_from(name);
  if (!k) fail("unknown mutation kind \"" + name + "\"");
  return *k;
}

Individual individual_from(const ordered_json& j) {
  Individual ind;
  ind.id = j.at("id").get<std::uint64_t>();
  ind.genome = Genome(j.at("genome").get<std::vector<double>>());
  const auto& d = j.at("descriptor");
  ind.desc.object_final = vec2_from(d.at("object_final"));
  ind.desc.touch_pos = vec2_from(d.at("touch_pos"));
  ind.desc.touch_angle = d.at("touch_angle").get<double>();
  ind.desc.mid_pos = vec2_from(d.at("mid_pos"));
  ind.desc.mid_angle = d.at("mid_angle").get<double>();
  ind.desc.eligible = d.at("eligible").get<std::array<bool, slot::count>>();
  ind.novelty = j.at("novelty").get<std::array<double, slot::count>>();
  ind.novelty_valid = j.at("novelty_valid").get<std::array<bool, slot::count>>();
  ind.success = j.at("success").get<bool>();
  const auto& s = j.at("summary");
  if (!s.at("t_touch").is_null()) ind.summary.t_touch = s.at("t_touch").get<int>();
  if (!s.at("grasp_step").is_null()) ind.summary.grasp_step = s.at("grasp_step").get<int>();
  if (!s.at("first_contact").is_null())
    ind.summary.first_contact = vec2_from(s.at("first_contact"));
  const auto& m = j.at("meta");
  ind.meta.generation = m.at("generation").get<int>();
  if (!m.at("parent").is_null()) ind.meta.parent = m.at("parent").get<std::uint64_t>();
  ind.meta.kind = kind_from_checked(m.at("kind").get<std::string>());
  if (!j.at("hint").is_null()) ind.pending_hint = kind_from_checked(j.at("hint").get<std::string>());
  return ind;
}

double parse_double(std::string_view s, const std::string& ctx) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail("malformed number \"" + std::string(s) + "\" in " + ctx);
  }
  return v;
}

long long parse_ll(std::string_view s, const std::string& ctx) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail("malformed integer \"" + std::string(s) + "\" in " + ctx);
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string rgb_lerp(double u) {
  const auto mix = [&](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * std::clamp(u, 0.0, 1.0)));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(0x28, 0xc8), mix(0x64, 0x34), mix(0xc8, 0x28));
  return buf;
}

void render_frame(std::ofstream& os, const Trajectory& traj, int t, const EnvConfig& env) {
  const double reach = env.reach();
  const double min_x = env.base.x - reach - 0.05;
  const double max_x = env.base.x + reach + 0.05;
  const double min_y = -0.05;
  const double max_y = env.base.y + reach + 0.05;
  const double width_px = 800.0;
  const double scale = width_px / (max_x - min_x);
  const double height_px = (max_y - min_y) * scale;
  const auto px = [&](Vec2 p) { return (p.x - min_x) * scale; };
  const auto py = [&](Vec2 p) { return (max_y - p.y) * scale; };
  const auto line = [&](Vec2 a, Vec2 b, const std::string& color, double w) {
    os << "<line x1=\"" << px(a) << "\" y1=\"" << py(a) << "\" x2=\"" << px(b) << "\" y2=\""
       << py(b) << "\" stroke=\"" << color << "\" stroke-width=\"" << w
       << "\" stroke-linecap=\"round\"/>\n";
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\""
     << height_px << "\" viewBox=\"0 0 " << width_px << " " << height_px << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n";
  line({min_x, 0.0}, {max_x, 0.0}, "#555555", 2.0);

  const TrajectoryStep& step = traj.steps[static_cast<std::size_t>(t)];

  // Object.
  if (env.object.shape == ShapeKind::Circle) {
    os << "<circle cx=\"" << px(step.object_pos) << "\" cy=\"" << py(step.object_pos) << "\" r=\""
       << env.object.radius * scale << "\" fill=\"#d9a441\" stroke=\"#8a6414\"/>\n";
  } else {
    const Vec2 he = env.object.half_extents;
    os << "<rect x=\"" << px(step.object_pos) - he.x * scale << "\" y=\""
       << py(step.object_pos) - he.y * scale << "\" width=\"" << 2.0 * he.x * scale
       << "\" height=\"" << 2.0 * he.y * scale << "\" fill=\"#d9a441\" stroke=\"#8a6414\""
       << " transform=\"rotate(" << -step.object_angle * 180.0 / kPi << " "
       << px(step.object_pos) << " " << py(step.object_pos) << ")\"/>\n";
  }

  // End-effector path so far, colored by time.
  const double denom = static_cast<double>(std::max<std::size_t>(traj.steps.size() - 1, 1));
  for (int u = 1; u <= t; ++u) {
    line(traj.steps[u - 1].ee_pos, traj.steps[u].ee_pos, rgb_lerp(u / denom), 1.5);
  }

  // Arm links and joints.
  const std::vector<Vec2> chain = chain_points(step.joints, env);
  for (std::size_t i = 1; i < chain.size(); ++i) line(chain[i - 1], chain[i], "#303030", 4.0);
  for (const Vec2& p : chain) {
    os << "<circle cx=\"" << px(p) << "\" cy=\"" << py(p)
       << "\" r=\"4\" fill=\"#ffffff\" stroke=\"#303030\"/>\n";
  }

  // Gripper.
  const GripperGeometry grip =
      gripper_segments({step.ee_pos, step.ee_angle}, step.gripper_opening, env.gripper);
  line(grip.finger_plus.a, grip.finger_plus.b, "#0a7d5a", 3.0);
  line(grip.finger_minus.a, grip.finger_minus.b, "#0a7d5a", 3.0);
  line(grip.palm.a, grip.palm.b, "#0a7d5a", 3.0);

  os << "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">t=" << t
     << " phase=" << to_string(step.phase) << "</text>\n";
  os << "</svg>\n";
}

}  // namespace

std::uint64_t config_hash(const EnvConfig& env) {
  const std::string canon = env_to_json(env).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

RunConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    fail(std::string("cannot parse config: ") + e.what());
  }
  return config_from(j);
}

void write_config(const RunConfig& cfg, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << config_to_json(cfg);
  finish_out(out, path);
}

RunConfig read_config(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const std::exception& e) {
    fail(path.string() + ": " + e.what());
  }
}

void write_repertoire(const SuccessArchive& archive, const EnvConfig& env,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  ordered_json header;
  header["format"] = "grasp-repertoire";
  header["version"] = kRepertoireVersion;
  header["env_hash"] = hash_hex(config_hash(env));
  header["joints"] = env.joints();
  out << header.dump() << "\n";
  for (const Individual& ind : archive.entries) out << individual_json(ind).dump() << "\n";
  finish_out(out, path);
}

RepertoireFile read_repertoire(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path.string() + ": missing header line");
  RepertoireFile file;
  try {
    const ordered_json header = ordered_json::parse(line);
    if (header.at("format").get<std::string>() != "grasp-repertoire") {
      fail("not a repertoire file (format=" + header.at("format").get<std::string>() + ")");
    }
    const int version = header.at("version").get<int>();
    if (version != kRepertoireVersion) {
      fail("incompatible repertoire version " + std::to_string(version) + " (this build reads " +
           std::to_string(kRepertoireVersion) + ")");
    }
    file.env_hash = hash_from_hex(header.at("env_hash").get<std::string>());
    file.joints = header.at("joints").get<int>();
  } catch (const ordered_json::exception& e) {
    fail(path.string() + ": malformed header at line 1: " + e.what());
  }
  const std::size_t want_genes = 3 * static_cast<std::size_t>(file.joints) + 1;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Individual ind = individual_from(ordered_json::parse(line));
      if (ind.genome.size() != want_genes) {
        fail("genome has " + std::to_string(ind.genome.size()) + " genes, header implies " +
             std::to_string(want_genes));
      }
      file.archive.entries.push_back(std::move(ind));
    } catch (const std::exception& e) {
      fail(path.string() + ": malformed record at line " + std::to_string(line_no) + ": " +
           e.what());
    }
  }
  return file;
}

void write_metrics(const std::vector<GenerationLog>& logs, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "generation,rollouts,successes_total,archive_size,approach_coverage,grasp_coverage,"
         "wall_time_s\n";
  for (const GenerationLog& log : logs) {
    out << log.generation << ',' << log.rollouts << ',' << log.successes_total << ','
        << log.archive_size << ',' << format_double(log.approach_coverage) << ','
        << format_double(log.grasp_coverage) << ",0\n";
  }
  finish_out(out, path);
}

std::vector<GenerationLog> read_metrics(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path.string() + ": missing header line");
  std::vector<GenerationLog> logs;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = path.string() + " line " + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (cells.size() != 7) fail(ctx + ": expected 7 columns, found " + std::to_string(cells.size()));
    GenerationLog log;
    log.generation = static_cast<int>(parse_ll(cells[0], ctx));
    log.rollouts = parse_ll(cells[1], ctx);
    log.successes_total = parse_ll(cells[2], ctx);
    log.archive_size = parse_ll(cells[3], ctx);
    log.approach_coverage = parse_double(cells[4], ctx);
    log.grasp_coverage = parse_double(cells[5], ctx);
    log.wall_time_s = parse_double(cells[6], ctx);
    logs.push_back(log);
  }
  return logs;
}

void write_summary(const AggregateSummary& summary, const std::filesystem::path& path) {
  auto out = open_out(path);
  ordered_json j;
  j["seeds"] = summary.seeds;
  j["success_rate"] = summary.success_rate;
  ordered_json points = ordered_json::array();
  const auto stat_json = [](const Stat& s) {
    ordered_json o;
    o["mean"] = s.mean;
    o["ci_halfwidth"] = s.ci_halfwidth ? ordered_json(*s.ci_halfwidth) : ordered_json(nullptr);
    return o;
  };
  for (const CheckpointStats& cp : summary.points) {
    ordered_json p;
    p["rollouts"] = cp.rollouts;
    p["successes"] = stat_json(cp.successes);
    p["approach_coverage"] = stat_json(cp.approach);
    p["grasp_coverage"] = stat_json(cp.grasp);
    points.push_back(std::move(p));
  }
  j["checkpoints"] = std::move(points);
  out << j.dump(2) << "\n";
  finish_out(out, path);
}

Trajectory replay_trace(const Genome& g, const EnvConfig& env, const std::filesystem::path& path,
                        const ReplayOptions& opts) {
  const Trajectory traj = rollout(g, env);
  const DecodedGenome decoded = decode_genome(g, env);

  auto out = open_out(path);
  out << "t,phase";
  for (int i = 0; i < env.joints(); ++i) out << ",q" << i;
  out << ",ee_x,ee_y,ee_angle,opening,obj_x,obj_y,obj_angle,contact_fp,contact_fm,contact_palm,"
         "events\n";
  for (const TrajectoryStep& step : traj.steps) {
    out << step.t << ',' << to_string(step.phase);
    for (double q : step.joints) out << ',' << format_double(q);
    out << ',' << format_double(step.ee_pos.x) << ',' << format_double(step.ee_pos.y) << ','
        << format_double(step.ee_angle) << ',' << format_double(step.gripper_opening) << ','
        << format_double(step.object_pos.x) << ',' << format_double(step.object_pos.y) << ','
        << format_double(step.object_angle) << ',' << int{step.contact[0]} << ','
        << int{step.contact[1]} << ',' << int{step.contact[2]} << ',';
    std::string events;
    const auto add = [&](const char* name) {
      if (!events.empty()) events += ';';
      events += name;
    };
    if (traj.t_touch && *traj.t_touch == step.t) add("touch");
    if (decoded.close_step == step.t) add("close");
    if (traj.grasp_established_at && *traj.grasp_established_at == step.t) add("grasp");
    out << events << "\n";
  }
  finish_out(out, path);

  if (opts.svg) {
    if (opts.frame_stride < 1) fail("frame stride must be at least 1");
    const int last = static_cast<int>(traj.steps.size()) - 1;
    for (int t = 0; t <= last; t += opts.frame_stride) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_%04d.svg", t);
      std::filesystem::path frame = path;
      frame.replace_extension();
      frame += suffix;
      auto svg = open_out(frame);
      render_frame(svg, traj, t, env);
      finish_out(svg, frame);
    }
  }
  return traj;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) fail("number formatting failed");
  return std::string(buf.data(), ptr);
}

}  // namespace e2r
