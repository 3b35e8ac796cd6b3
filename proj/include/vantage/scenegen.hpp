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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vantage/error.hpp"
#include "vantage/geometry.hpp"
#include "vantage/image_io.hpp"
#include "vantage/objectives.hpp"
#include "vantage/parallel.hpp"
#include "vantage/planner.hpp"
#include "vantage/rng.hpp"
#include "vantage/serialization.hpp"

namespace vantage {

enum class SceneKind { kCube, kIcosphere, kDihedral, kBlocks, kCheckerBall };
enum class ColorMode { kFlat, kChecker, kPerFaceRandom };

struct SceneSpec {
  SceneKind kind = SceneKind::kCube;
  int subdivisions = 2;      // icosphere
  double angle_deg = 90.0;   // dihedral opening angle; 180 is a flat plane
  int blocks = 5;            // blocks
  double pitch_deg = 30.0;   // checker cell size in longitude/latitude
  ColorMode color_mode = ColorMode::kFlat;
  std::int64_t seed = 0;     // blocks layout and random colors

  std::string name() const {
    auto num = [](double v) {
      std::string s = format_fixed(v, 0);
      return s;
    };
    switch (kind) {
      case SceneKind::kCube: return "cube";
      case SceneKind::kIcosphere: return "icosphere" + std::to_string(subdivisions);
      case SceneKind::kDihedral: return "dihedral" + num(angle_deg);
      case SceneKind::kBlocks: return "blocks" + std::to_string(blocks) + "_s" + std::to_string(seed);
      case SceneKind::kCheckerBall: return "checker_ball" + num(pitch_deg);
    }
    return "scene";
  }
};

inline std::string_view scene_kind_name(SceneKind k) {
  switch (k) {
    case SceneKind::kCube: return "cube";
    case SceneKind::kIcosphere: return "icosphere";
    case SceneKind::kDihedral: return "dihedral";
    case SceneKind::kBlocks: return "blocks";
    case SceneKind::kCheckerBall: return "checker_ball";
  }
  return "?";
}

inline SceneKind parse_scene_kind(std::string_view s) {
  for (SceneKind k : {SceneKind::kCube, SceneKind::kIcosphere, SceneKind::kDihedral, SceneKind::kBlocks,
                      SceneKind::kCheckerBall})
    if (scene_kind_name(k) == s) return k;
  throw InvalidArgument("unknown scene kind '" + std::string(s) + "'");
}

inline std::string_view color_mode_name(ColorMode m) {
  switch (m) {
    case ColorMode::kFlat: return "flat";
    case ColorMode::kChecker: return "checker";
    case ColorMode::kPerFaceRandom: return "per_face_random";
  }
  return "?";
}

inline ColorMode parse_color_mode(std::string_view s) {
  for (ColorMode m : {ColorMode::kFlat, ColorMode::kChecker, ColorMode::kPerFaceRandom})
    if (color_mode_name(m) == s) return m;
  throw InvalidArgument("unknown color mode '" + std::string(s) + "'");
}

// The five procedural families used for planning experiments.
inline std::vector<SceneSpec> reference_scene_specs() {
  std::vector<SceneSpec> specs(5);
  specs[0].kind = SceneKind::kCube;
  specs[1].kind = SceneKind::kIcosphere;
  specs[1].subdivisions = 2;
  specs[2].kind = SceneKind::kDihedral;
  specs[2].angle_deg = 90.0;
  specs[3].kind = SceneKind::kBlocks;
  specs[3].blocks = 5;
  specs[3].seed = 1;
  specs[3].color_mode = ColorMode::kPerFaceRandom;
  specs[4].kind = SceneKind::kCheckerBall;
  specs[4].pitch_deg = 30.0;
  specs[4].color_mode = ColorMode::kChecker;
  return specs;
}

namespace detail {

struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  void add_box(const Vec3& lo, const Vec3& hi) {
    const auto base = static_cast<std::uint32_t>(vertices.size());
    for (int i = 0; i < 8; ++i)
      vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
    // Outward winding, two triangles per side.
    static constexpr std::array<std::array<std::uint32_t, 3>, 12> kTris{{
        {0, 2, 1}, {1, 2, 3},  // -z
        {4, 5, 6}, {5, 7, 6},  // +z
        {0, 1, 4}, {1, 5, 4},  // -y
        {2, 6, 3}, {3, 6, 7},  // +y
        {0, 4, 2}, {2, 4, 6},  // -x
        {1, 3, 5}, {3, 7, 5},  // +x
    }};
    for (const auto& t : kTris) faces.push_back({base + t[0], base + t[1], base + t[2]});
  }
};

inline RawMesh icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  RawMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const auto id = static_cast<std::uint32_t>(m.vertices.size() - 1);
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const std::uint32_t a = mid(f[0], f[1]);
      const std::uint32_t b = mid(f[1], f[2]);
      const std::uint32_t c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    m.faces = std::move(next);
  }
  return m;
}

inline RawMesh dihedral(double angle_deg) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const Vec3 b(-std::cos(a), 0.0, std::sin(a));
  RawMesh m;
  m.vertices = {{0, -1, 0}, {0, 1, 0}, {-1, 1, 0}, {-1, -1, 0}, b + Vec3(0, 1, 0), b + Vec3(0, -1, 0)};
  m.faces = {{0, 1, 2}, {0, 2, 3}, {0, 5, 4}, {0, 4, 1}};
  return m;
}

inline Color checker_color(const Vec3& centroid, double pitch_deg) {
  const double lon = std::atan2(centroid.y(), centroid.x()) * 180.0 / std::numbers::pi + 180.0;
  const double lat = std::asin(std::clamp(centroid.normalized().z(), -1.0, 1.0)) * 180.0 / std::numbers::pi + 90.0;
  const auto cell = static_cast<long>(std::floor(lon / pitch_deg)) + static_cast<long>(std::floor(lat / pitch_deg));
  return cell % 2 == 0 ? Color(0.9, 0.2, 0.2) : Color(0.2, 0.35, 0.9);
}

}  // namespace detail

// Deterministic procedural mesh, normalized to the [-1, 1] cube.
inline TriangleMesh generate_scene(const SceneSpec& spec) {
  detail::RawMesh raw;
  switch (spec.kind) {
    case SceneKind::kCube:
      raw.add_box(Vec3::Constant(-1.0), Vec3::Constant(1.0));
      break;
    case SceneKind::kIcosphere:
      if (spec.subdivisions < 0 || spec.subdivisions > 6) throw InvalidArgument("subdivisions must be in [0, 6]");
      raw = detail::icosphere(spec.subdivisions);
      break;
    case SceneKind::kDihedral:
      if (!(spec.angle_deg > 0.0 && spec.angle_deg <= 180.0)) throw InvalidArgument("angle_deg must be in (0, 180]");
      raw = detail::dihedral(spec.angle_deg);
      break;
    case SceneKind::kBlocks: {
      if (spec.blocks < 1 || spec.blocks > 64) throw InvalidArgument("blocks must be in [1, 64]");
      Rng rng(static_cast<std::uint64_t>(spec.seed));
      for (int i = 0; i < spec.blocks; ++i) {
        const Vec3 c(rng.uniform() * 1.2 - 0.6, rng.uniform() * 1.2 - 0.6, rng.uniform() * 1.2 - 0.6);
        const Vec3 h(0.15 + 0.3 * rng.uniform(), 0.15 + 0.3 * rng.uniform(), 0.15 + 0.3 * rng.uniform());
        raw.add_box(c - h, c + h);
      }
      break;
    }
    case SceneKind::kCheckerBall:
      if (!(spec.pitch_deg > 0.0)) throw InvalidArgument("pitch_deg must be positive");
      raw = detail::icosphere(3);
      break;
  }
  if (!(spec.pitch_deg > 0.0)) throw InvalidArgument("pitch_deg must be positive");

  std::vector<Color> colors(raw.faces.size(), Color(0.8, 0.55, 0.3));
  if (spec.color_mode == ColorMode::kChecker) {
    for (std::size_t f = 0; f < raw.faces.size(); ++f) {
      const Vec3 centroid =
          (raw.vertices[raw.faces[f][0]] + raw.vertices[raw.faces[f][1]] + raw.vertices[raw.faces[f][2]]) / 3.0;
      colors[f] = detail::checker_color(centroid, spec.pitch_deg);
    }
  } else if (spec.color_mode == ColorMode::kPerFaceRandom) {
    Rng rng(static_cast<std::uint64_t>(spec.seed) ^ 0x5bd1e995u);
    for (auto& c : colors) c = Color(0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform());
  }
  return normalize_scale(TriangleMesh::build(std::move(raw.vertices), std::move(raw.faces), std::move(colors)));
}

inline constexpr std::size_t kWalkNeighbors = 8;

// Random walks over a pose set. Each walk starts at a uniformly drawn pose
// and moves to one of the 8 angularly nearest unvisited poses.
inline std::vector<std::vector<std::size_t>> random_walk_trajectories(const PoseSet& candidates, std::size_t length,
                                                                      std::size_t count, std::int64_t seed) {
  if (length == 0 || length > candidates.size())
    throw InvalidArgument("walk length must be in [1, candidate count]");
  Rng rng(static_cast<std::uint64_t>(seed));
  std::vector<std::vector<std::size_t>> walks;
  for (std::size_t w = 0; w < count; ++w) {
    std::vector<std::size_t> walk{static_cast<std::size_t>(rng.index(candidates.size()))};
    std::vector<bool> used(candidates.size(), false);
    used[walk[0]] = true;
    while (walk.size() < length) {
      const Vec3 here = candidates[walk.back()].center();
      std::vector<std::pair<double, std::size_t>> near;
      for (std::size_t k = 0; k < candidates.size(); ++k)
        if (!used[k]) near.emplace_back(angular_distance_deg(here, candidates[k].center()), k);
      const std::size_t keep = std::min(kWalkNeighbors, near.size());
      std::partial_sort(near.begin(), near.begin() + keep, near.end());
      const std::size_t next = near[rng.index(keep)].second;
      used[next] = true;
      walk.push_back(next);
    }
    walks.push_back(std::move(walk));
  }
  return walks;
}

struct TupleExportOptions {
  std::size_t candidates_per_prefix = 16;
  std::int64_t seed = 0;
  std::size_t threads = 1;
  std::string scene_name = "scene";
};

struct TupleRecord {
  std::string id;
  std::string path;  // relative to the scene directory
  std::size_t walk = 0;
  std::vector<std::size_t> visited;
  std::size_t candidate = 0;
  ScoreVector label_n;
  ScoreVector label_n1;
};

// Candidate indices sampled for one (walk, prefix) pair.
inline std::vector<std::size_t> sample_prefix_candidates(std::size_t pose_count,
                                                         const std::vector<std::size_t>& visited,
                                                         std::size_t walk, std::size_t prefix,
                                                         const TupleExportOptions& options) {
  std::vector<std::size_t> unseen;
  for (std::size_t k = 0; k < pose_count; ++k)
    if (std::find(visited.begin(), visited.end(), k) == visited.end()) unseen.push_back(k);
  Rng rng(static_cast<std::uint64_t>(options.seed) * 0x9e3779b97f4a7c15ull + walk * 1000003ull + prefix);
  std::vector<std::size_t> picked;
  for (std::size_t i : rng.sample_without_replacement(unseen.size(), options.candidates_per_prefix))
    picked.push_back(unseen[i]);
  return picked;
}

// Score labels for (visited, candidate), computed from scratch without any
// cached observation.
inline std::pair<ScoreVector, ScoreVector> recompute_labels(const MeshScene& scene, const PoseSet& candidates,
                                                            const std::vector<std::size_t>& visited,
                                                            std::size_t candidate, const ObjectiveParams& params,
                                                            const RenderSettings& settings) {
  ScoreState state(scene.face_count());
  for (std::size_t k : visited) state.fold(measure_view(scene, candidates[k], k, params, settings), params);
  const ScoreVector before = score_vector(state, params);
  state.fold(measure_view(scene, candidates[candidate], candidate, params, settings), params);
  return {before, score_vector(state, params)};
}

// Writes images/<k>.png for every walk pose and tuples/<id>.json for every
// (walk prefix, sampled unseen candidate) pair under `scene_dir`. Labels are
// the smoothed score vectors before (F_n) and after (F_n+1) folding the
// candidate. Returns records in a deterministic order.
inline std::vector<TupleRecord> export_training_tuples(const ViewCache& cache,
                                                       const std::vector<std::vector<std::size_t>>& walks,
                                                       const std::filesystem::path& scene_dir,
                                                       const TupleExportOptions& options) {
  const PoseSet& poses = cache.poses();
  const auto& params = cache.params();
  for (const auto& walk : walks)
    for (std::size_t k : walk)
      if (k >= poses.size()) throw InvalidArgument("walk references pose " + std::to_string(k) + " out of range");

  std::vector<std::size_t> imaged;
  for (const auto& walk : walks) imaged.insert(imaged.end(), walk.begin(), walk.end());
  std::sort(imaged.begin(), imaged.end());
  imaged.erase(std::unique(imaged.begin(), imaged.end()), imaged.end());
  parallel_for(imaged.size(), options.threads, [&](std::size_t i) {
    const std::size_t k = imaged[i];
    write_color_png(scene_dir / "images" / (std::to_string(k) + ".png"),
                    render_view(cache.scene(), poses[k], cache.settings().resolution));
  });

  std::vector<std::pair<std::size_t, std::size_t>> tasks;  // (walk, prefix length)
  for (std::size_t w = 0; w < walks.size(); ++w)
    for (std::size_t n = 1; n <= walks[w].size(); ++n) tasks.emplace_back(w, n);

  std::vector<std::vector<TupleRecord>> per_task(tasks.size());
  std::filesystem::create_directories(scene_dir / "tuples");
  parallel_for(tasks.size(), options.threads, [&](std::size_t t) {
    const auto [w, n] = tasks[t];
    const std::vector<std::size_t> visited(walks[w].begin(), walks[w].begin() + static_cast<std::ptrdiff_t>(n));
    ScoreState state(cache.scene().face_count());
    for (std::size_t k : visited) state.fold(cache.get(k), params);
    const ScoreVector before = score_vector(state, params);
    const auto picks = sample_prefix_candidates(poses.size(), visited, w, n, options);
    for (std::size_t c = 0; c < picks.size(); ++c) {
      TupleRecord rec;
      rec.id = options.scene_name + "_w" + std::to_string(w) + "_n" + std::to_string(n) + "_c" + std::to_string(c);
      rec.path = "tuples/" + rec.id + ".json";
      rec.walk = w;
      rec.visited = visited;
      rec.candidate = picks[c];
      rec.label_n = before;
      rec.label_n1 = score_vector(fold_observation(state, cache.get(picks[c]), params), params);

      Json visited_poses = Json::array();
      Json images = Json::array();
      for (std::size_t k : visited) {
        visited_poses.push_back(extrinsics_to_json(poses[k].extrinsics()));
        images.push_back("images/" + std::to_string(k) + ".png");
      }
      const Json doc = {{"id", rec.id},
                        {"scene", options.scene_name},
                        {"walk", w},
                        {"prefix_length", n},
                        {"visited_pose_indices", visited},
                        {"visited_poses", visited_poses},
                        {"visited_images", images},
                        {"candidate_pose_index", rec.candidate},
                        {"candidate_pose", extrinsics_to_json(poses[rec.candidate].extrinsics())},
                        {"label_F_n", scores_to_json(rec.label_n)},
                        {"label_F_n1", scores_to_json(rec.label_n1)}};
      write_json_file(scene_dir / rec.path, doc);
      per_task[t].push_back(std::move(rec));
    }
  });
  std::vector<TupleRecord> records;
  for (auto& batch : per_task)
    for (auto& r : batch) records.push_back(std::move(r));
  return records;
}

struct DatasetConfig {
  std::vector<SceneSpec> scenes = reference_scene_specs();
  std::size_t train_poses = 30;
  std::size_t val_poses = 10;
  std::size_t test_poses = 20;
  double radius = kDefaultSphereRadius;
  SphereOptions sphere;
  std::size_t walks_per_scene = 2;
  std::size_t walk_length = 30;
  std::size_t candidates_per_prefix = 16;
  std::int64_t seed = 0;
  ObjectiveParams params;
  RenderSettings render;
  std::size_t threads = 1;
};

inline Json scene_spec_to_json(const SceneSpec& s) {
  return {{"kind", scene_kind_name(s.kind)}, {"subdivisions", s.subdivisions}, {"angle_deg", s.angle_deg},
          {"blocks", s.blocks},              {"pitch_deg", s.pitch_deg},       {"color_mode", color_mode_name(s.color_mode)},
          {"seed", s.seed}};
}

struct DatasetSummary {
  std::size_t tuple_count = 0;
  std::vector<std::string> scene_names;
};

// Full dataset: per scene mesh.obj, poses{,_val,_test}.json, images/,
// tuples/; manifest.json at the root, written last.
inline DatasetSummary generate_dataset(const DatasetConfig& config, const std::filesystem::path& out) {
  config.params.validate();
  config.render.validate();
  if (config.walk_length > config.train_poses) throw InvalidArgument("walk_length exceeds train_poses");
  Json scenes = Json::array();
  Json tuples = Json::array();
  DatasetSummary summary;
  for (std::size_t s = 0; s < config.scenes.size(); ++s) {
    const SceneSpec& spec = config.scenes[s];
    const std::string name = spec.name();
    const std::filesystem::path dir = out / "scenes" / name;
    std::filesystem::create_directories(dir);
    const MeshScene scene(generate_scene(spec));
    write_mesh_obj(scene.mesh(), dir / "mesh.obj");

    const std::int64_t base = config.seed + static_cast<std::int64_t>(s) * 101;
    const PoseSet train = generate_sphere_poses(config.radius, config.train_poses, SphereMode::kRandom, base, config.sphere);
    write_json_file(dir / "poses.json", pose_set_to_json(train));
    if (config.val_poses > 0)
      write_json_file(dir / "poses_val.json",
                      pose_set_to_json(generate_sphere_poses(config.radius, config.val_poses, SphereMode::kRandom,
                                                             base + 1, config.sphere)));
    if (config.test_poses > 0)
      write_json_file(dir / "poses_test.json",
                      pose_set_to_json(generate_sphere_poses(config.radius, config.test_poses, SphereMode::kRing,
                                                             base + 2, config.sphere)));

    const auto walks = random_walk_trajectories(train, config.walk_length, config.walks_per_scene, base + 3);
    const ViewCache cache(scene, train, config.params, config.render);
    TupleExportOptions options;
    options.candidates_per_prefix = config.candidates_per_prefix;
    options.seed = base + 4;
    options.threads = config.threads;
    options.scene_name = name;
    const auto records = export_training_tuples(cache, walks, dir, options);

    const std::string rel = "scenes/" + name + "/";
    scenes.push_back({{"name", name},
                      {"spec", scene_spec_to_json(spec)},
                      {"faces", scene.face_count()},
                      {"mesh", rel + "mesh.obj"},
                      {"poses", rel + "poses.json"},
                      {"walks", walks}});
    for (const auto& r : records) tuples.push_back({{"id", r.id}, {"scene", name}, {"path", rel + r.path}});
    summary.tuple_count += records.size();
    summary.scene_names.push_back(name);
  }
  const Json manifest = {{"params", params_to_json(config.params)},
                         {"render", {{"resolution", config.render.resolution},
                                     {"texture_resolution", config.render.texture_resolution}}},
                         {"seed", config.seed},
                         {"scenes", scenes},
                         {"tuple_count", summary.tuple_count},
                         {"tuples", tuples}};
  write_json_file(out / "manifest.json", manifest);
  return summary;
}

}  // namespace vantage
