// Copyright 2026 The Vantage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vantage/vantage.hpp"

namespace vantage::cli {

// A configuration problem; `key` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct CandidateSource {
  std::optional<std::filesystem::path> poses_file;
  std::size_t count = 100;
  double radius = kDefaultSphereRadius;
  SphereMode mode = SphereMode::kRandom;
  SphereOptions sphere;
  std::optional<std::int64_t> seed;
};

struct RunConfig {
  std::string command;
  std::int64_t seed = 0;
  std::optional<std::filesystem::path> scene_obj;
  std::optional<SceneSpec> scene_spec;
  CandidateSource candidates;
  PlannerConfig planner;
  RenderSettings render;
  std::vector<std::size_t> visited;
  std::optional<std::filesystem::path> trajectory;
  DatasetConfig data;
  std::filesystem::path out = "out";
  std::size_t threads = default_thread_count();
  bool verbose = false;
  bool dump_views = false;
};

namespace detail {

// Reads a JSON object and rejects keys that were never consumed.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be a JSON object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(name(key), "has the wrong type");
    }
  }

  const Json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError(name(key), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline SceneSpec parse_scene_spec(const Json& j, const std::string& where) {
  Section s(j, where);
  SceneSpec spec;
  std::string kind, color;
  s.read("kind", kind);
  if (kind.empty()) throw ConfigError(s.name("kind"), "is required");
  try {
    spec.kind = parse_scene_kind(kind);
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.name("kind"), e.what());
  }
  if (spec.kind == SceneKind::kBlocks) spec.color_mode = ColorMode::kPerFaceRandom;
  if (spec.kind == SceneKind::kCheckerBall) spec.color_mode = ColorMode::kChecker;
  s.read("subdivisions", spec.subdivisions);
  s.read("angle_deg", spec.angle_deg);
  s.read("blocks", spec.blocks);
  s.read("pitch_deg", spec.pitch_deg);
  s.read("seed", spec.seed);
  s.read("color_mode", color);
  if (!color.empty()) {
    try {
      spec.color_mode = parse_color_mode(color);
    } catch (const InvalidArgument& e) {
      throw ConfigError(s.name("color_mode"), e.what());
    }
  }
  s.finish();
  return spec;
}

inline void parse_params(const Json& j, ObjectiveParams& p) {
  Section s(j, "params");
  s.read("sigma_q", p.sigma_q);
  s.read("beta_q", p.beta_q);
  s.read("d_q", p.d_q);
  s.read("r_t", p.r_t);
  s.read("p_t", p.p_t);
  s.read("d_t", p.d_t);
  s.read("alpha1", p.alpha1);
  s.read("alpha2", p.alpha2);
  s.read("alpha3", p.alpha3);
  s.finish();
}

// Validation messages start with the field name; map it to a config key.
inline ConfigError as_config_error(const std::string& section, const InvalidArgument& e) {
  const std::string msg = e.what();
  const std::string field = msg.substr(0, msg.find(' '));
  return ConfigError(section + "." + field, msg);
}

}  // namespace detail

// Parses a config document. Relative paths resolve against `base`.
inline void apply_config(const Json& doc, const std::filesystem::path& base, RunConfig& rc) {
  using detail::Section;
  Section root(doc, "");
  root.read("seed", rc.seed);

  if (root.has("scene")) {
    const Json& sj = root.at("scene");
    if (sj.is_object() && sj.contains("obj")) {
      Section s(sj, "scene");
      std::string obj;
      s.read("obj", obj);
      rc.scene_obj = detail::resolve(base, obj);
      s.finish();
    } else {
      rc.scene_spec = detail::parse_scene_spec(sj, "scene");
    }
  }

  if (root.has("candidates")) {
    Section s(root.at("candidates"), "candidates");
    auto& c = rc.candidates;
    if (s.has("poses")) {
      std::string p;
      s.read("poses", p);
      c.poses_file = detail::resolve(base, p);
    }
    s.read("count", c.count);
    s.read("radius", c.radius);
    std::string mode;
    s.read("mode", mode);
    if (!mode.empty()) {
      if (mode == "random") c.mode = SphereMode::kRandom;
      else if (mode == "ring") c.mode = SphereMode::kRing;
      else throw ConfigError("candidates.mode", "must be 'random' or 'ring'");
    }
    s.read("elevation_deg", c.sphere.elevation_deg);
    s.read("fov_y_deg", c.sphere.fov_y_deg);
    s.read("width", c.sphere.width);
    s.read("height", c.sphere.height);
    if (s.has("seed")) {
      std::int64_t seed = 0;
      s.read("seed", seed);
      c.seed = seed;
    }
    s.finish();
    if (c.poses_file) {
      for (const char* k : {"count", "radius", "mode", "elevation_deg", "fov_y_deg", "width", "height", "seed"})
        if (root.at("candidates").contains(k))
          throw ConfigError(std::string("candidates.") + k, "conflicts with candidates.poses");
    }
  }

  if (root.has("planner")) {
    Section s(root.at("planner"), "planner");
    auto& p = rc.planner;
    s.read("budget", p.budget);
    s.read("n_init", p.n_init);
    if (s.has("sequence")) {
      std::vector<std::string> tags;
      s.read("sequence", tags);
      p.sequence.clear();
      for (const auto& t : tags) {
        try {
          p.sequence.push_back(parse_objective(t));
        } catch (const InvalidArgument& e) {
          throw ConfigError("planner.sequence", e.what());
        }
      }
    }
    std::string indexing;
    s.read("sequence_indexing", indexing);
    if (!indexing.empty()) {
      if (indexing == "restart") p.indexing = SequenceIndexing::kRestart;
      else if (indexing == "paper_literal") p.indexing = SequenceIndexing::kModuloStep;
      else throw ConfigError("planner.sequence_indexing", "must be 'restart' or 'paper_literal'");
    }
    s.finish();
  }

  if (root.has("params")) detail::parse_params(root.at("params"), rc.planner.params);

  if (root.has("render")) {
    Section s(root.at("render"), "render");
    s.read("resolution", rc.render.resolution);
    s.read("texture_resolution", rc.render.texture_resolution);
    s.finish();
  }

  if (root.has("score")) {
    Section s(root.at("score"), "score");
    s.read("visited", rc.visited);
    s.finish();
  }

  if (root.has("trajectory")) {
    std::string t;
    root.read("trajectory", t);
    rc.trajectory = detail::resolve(base, t);
  }

  if (root.has("gen_data")) {
    Section s(root.at("gen_data"), "gen_data");
    auto& d = rc.data;
    if (s.has("scenes")) {
      const Json& arr = s.at("scenes");
      if (!arr.is_array() || arr.empty()) throw ConfigError("gen_data.scenes", "must be a non-empty array");
      d.scenes.clear();
      for (std::size_t i = 0; i < arr.size(); ++i)
        d.scenes.push_back(detail::parse_scene_spec(arr[i], "gen_data.scenes[" + std::to_string(i) + "]"));
    }
    s.read("train_poses", d.train_poses);
    s.read("val_poses", d.val_poses);
    s.read("test_poses", d.test_poses);
    s.read("radius", d.radius);
    s.read("walks_per_scene", d.walks_per_scene);
    s.read("walk_length", d.walk_length);
    s.read("candidates_per_prefix", d.candidates_per_prefix);
    s.finish();
  }
  root.finish();
}

// Cross-field checks that need the whole config.
inline void validate(RunConfig& rc) {
  const bool needs_scene = rc.command != "gen-data" && rc.command != "export-transforms";
  if (needs_scene && !rc.scene_obj && !rc.scene_spec) throw ConfigError("scene", "is required for " + rc.command);
  try {
    rc.planner.params.validate();
  } catch (const InvalidArgument& e) {
    throw detail::as_config_error("params", e);
  }
  try {
    rc.render.validate();
  } catch (const InvalidArgument& e) {
    throw detail::as_config_error("render", e);
  }
  if (!rc.candidates.poses_file && rc.candidates.count == 0) throw ConfigError("candidates.count", "must be positive");
  if (rc.command == "plan" || rc.command == "audit") {
    const std::size_t n = rc.candidates.poses_file ? std::numeric_limits<std::size_t>::max() : rc.candidates.count;
    try {
      rc.planner.validate(n);
    } catch (const InvalidArgument& e) {
      throw detail::as_config_error("planner", e);
    }
  }
  if ((rc.command == "audit" || rc.command == "export-transforms") && !rc.trajectory)
    throw ConfigError("trajectory", "is required for " + rc.command);
  if (rc.command == "gen-data") {
    if (rc.data.walk_length == 0 || rc.data.walk_length > rc.data.train_poses)
      throw ConfigError("gen_data.walk_length", "must be in [1, train_poses]");
    if (rc.data.train_poses == 0) throw ConfigError("gen_data.train_poses", "must be positive");
  }
  rc.planner.seed = rc.seed;
  rc.planner.threads = rc.threads;
  rc.data.seed = rc.seed;
  rc.data.params = rc.planner.params;
  rc.data.render = rc.render;
  rc.data.threads = rc.threads;
}

inline Json config_echo(const RunConfig& rc) {
  Json seq = Json::array();
  for (Objective o : rc.planner.sequence) seq.push_back(objective_tag(o));
  Json echo = {{"command", rc.command},
               {"seed", rc.seed},
               {"params", params_to_json(rc.planner.params)},
               {"render", {{"resolution", rc.render.resolution}, {"texture_resolution", rc.render.texture_resolution}}},
               {"planner",
                {{"budget", rc.planner.budget},
                 {"n_init", rc.planner.n_init},
                 {"sequence", seq},
                 {"sequence_indexing",
                  rc.planner.indexing == SequenceIndexing::kRestart ? "restart" : "paper_literal"}}}};
  if (rc.scene_obj) echo["scene"] = {{"obj", rc.scene_obj->string()}};
  if (rc.scene_spec) echo["scene"] = scene_spec_to_json(*rc.scene_spec);
  const auto& c = rc.candidates;
  if (c.poses_file) {
    echo["candidates"] = {{"poses", c.poses_file->string()}};
  } else {
    echo["candidates"] = {{"count", c.count},
                          {"radius", c.radius},
                          {"mode", c.mode == SphereMode::kRandom ? "random" : "ring"},
                          {"seed", c.seed.value_or(rc.seed)}};
  }
  return echo;
}

namespace detail {

inline TriangleMesh load_scene(const RunConfig& rc) {
  if (rc.scene_obj) return normalize_scale(load_mesh_obj(*rc.scene_obj));
  return generate_scene(*rc.scene_spec);
}

inline PoseSet load_candidates(const RunConfig& rc) {
  const auto& c = rc.candidates;
  if (c.poses_file) return pose_set_from_json(read_json_file(*c.poses_file));
  return generate_sphere_poses(c.radius, c.count, c.mode, c.seed.value_or(rc.seed), c.sphere);
}

inline void dump_views(const RunConfig& rc, const MeshScene& scene, const PoseSet& poses,
                       const std::vector<std::size_t>& which) {
  for (std::size_t k : which)
    dump_view_buffers(rc.out / "views", "pose_" + std::to_string(k), render_view(scene, poses[k], rc.render.resolution));
}

inline int run_score(const RunConfig& rc, std::ostream& log) {
  const MeshScene scene(load_scene(rc));
  const PoseSet poses = load_candidates(rc);
  const auto& params = rc.planner.params;
  ScoreState state(scene.face_count());
  Trajectory record;
  record.budget = rc.visited.size();
  for (std::size_t k : rc.visited) {
    if (k >= poses.size()) throw InvalidArgument("visited pose " + std::to_string(k) + " out of range");
    state.fold(measure_view(scene, poses[k], k, params, rc.render), params);
    TrajectoryStep step;
    step.step = record.steps.size() + 1;
    step.pose = k;
    step.objective = Objective::kInit;
    step.scores = score_vector(state, params);
    record.steps.push_back(step);
  }
  const RawScores raw = raw_scores(state, params);
  const ScoreVector smoothed = smooth(raw, params);
  const Json doc = {{"visited", rc.visited},
                    {"scores", scores_to_json(smoothed)},
                    {"raw", {{"f_C", raw.coverage}, {"f_Q", raw.geometric}, {"f_D", raw.diversity}, {"f_T", raw.texture}}},
                    {"config", config_echo(rc)}};
  write_json_file(rc.out / "scores.json", doc);
  write_text_file(rc.out / "scores.csv", trajectory_csv(record));
  if (rc.dump_views) dump_views(rc, scene, poses, rc.visited);
  log << "f_C=" << format_fixed(smoothed.f_c) << " f_Q=" << format_fixed(smoothed.f_q)
      << " f_D=" << format_fixed(smoothed.f_d) << " f_T=" << format_fixed(smoothed.f_t) << '\n';
  return 0;
}

inline int run_plan(const RunConfig& rc, std::ostream& log) {
  const MeshScene scene(load_scene(rc));
  const PoseSet poses = load_candidates(rc);
  PlannerConfig config = rc.planner;
  config.record_candidates = rc.verbose;
  try {
    config.validate(poses.size());
  } catch (const InvalidArgument& e) {
    throw as_config_error("planner", e);
  }
  const ViewCache cache(scene, poses, config.params, rc.render);
  cache.prefetch_all(rc.threads);
  const Trajectory traj = plan_trajectory(cache, config);
  write_json_file(rc.out / "trajectory.json", trajectory_to_json(traj));
  write_text_file(rc.out / "trajectory.csv", trajectory_csv(traj));
  write_json_file(rc.out / "poses.json", pose_set_to_json(poses));
  write_json_file(rc.out / "manifest.json", config_echo(rc));
  if (rc.verbose) write_text_file(rc.out / "candidates.csv", candidate_table_csv(traj));
  if (rc.dump_views) dump_views(rc, scene, poses, traj.poses());
  for (const auto& s : traj.steps)
    log << "step " << s.step << " pose " << s.pose << " [" << objective_tag(s.objective) << "]\n";
  return 0;
}

inline int run_audit(const RunConfig& rc, std::ostream& log) {
  const MeshScene scene(load_scene(rc));
  const PoseSet poses = load_candidates(rc);
  const Trajectory traj = trajectory_from_json(read_json_file(*rc.trajectory));
  PlannerConfig config = rc.planner;
  config.budget = traj.budget;
  config.validate(poses.size());
  const ViewCache cache(scene, poses, config.params, rc.render);
  cache.prefetch_all(rc.threads);
  const AuditReport report = audit_trajectory(cache, traj, config);
  for (const auto& v : report.violations) log << "violation: " << v << '\n';
  log << (report.ok() ? "audit passed" : "audit FAILED") << " (" << report.greedy_steps_checked
      << " greedy steps checked)\n";
  return report.ok() ? 0 : 1;
}

inline int run_export_transforms(const RunConfig& rc, std::ostream& log) {
  const PoseSet poses = load_candidates(rc);
  const Trajectory traj = trajectory_from_json(read_json_file(*rc.trajectory));
  export_transforms(poses, traj, rc.out / "transforms.json");
  log << "wrote " << (rc.out / "transforms.json").string() << " with " << traj.steps.size() << " frames\n";
  return 0;
}

inline int run_gen_data(const RunConfig& rc, std::ostream& log) {
  const DatasetSummary summary = generate_dataset(rc.data, rc.out);
  log << "wrote " << summary.tuple_count << " tuples for " << summary.scene_names.size() << " scenes\n";
  return 0;
}

}  // namespace detail

// Entry point shared by the executable and the tests. Exit codes: 0 ok,
// 1 runtime failure (or failed audit), 2 configuration error.
inline int run(const std::vector<std::string>& args, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  RunConfig rc;
  CLI::App app{"Surrogate-objective view planning"};
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::optional<int> resolution;
  std::optional<std::size_t> threads;
  app.add_option("command", rc.command, "score | plan | gen-data | export-transforms | audit")
      ->required()
      ->check(CLI::IsMember({"score", "plan", "gen-data", "export-transforms", "audit"}));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", rc.out, "output directory");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--threads", threads, "worker threads (default: logical cores)");
  app.add_option("--resolution", resolution, "render resolution for visibility and LoG");
  app.add_flag("--verbose", rc.verbose, "also write the per-step candidate score table");
  app.add_flag("--dump-views", rc.dump_views, "write color/normal/face-id PNGs of the views used");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!config_path.empty()) {
      const std::filesystem::path p(config_path);
      apply_config(read_json_file(p), p.parent_path(), rc);
    }
    if (seed) rc.seed = *seed;
    if (resolution) rc.render.resolution = *resolution;
    if (threads) rc.threads = std::max<std::size_t>(1, *threads);
    validate(rc);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    std::filesystem::create_directories(rc.out);
    if (rc.command == "score") return detail::run_score(rc, log);
    if (rc.command == "plan") return detail::run_plan(rc, log);
    if (rc.command == "audit") return detail::run_audit(rc, log);
    if (rc.command == "export-transforms") return detail::run_export_transforms(rc, log);
    return detail::run_gen_data(rc, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace vantage::cli
