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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vantage/error.hpp"
#include "vantage/geometry.hpp"
#include "vantage/objectives.hpp"
#include "vantage/planner.hpp"

namespace vantage {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw MalformedInput(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

// 3x4 extrinsics as three rows of four numbers.
inline Json extrinsics_to_json(const Extrinsics& e) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({e(r, 0), e(r, 1), e(r, 2), e(r, 3)});
  return rows;
}

// Accepts three rows of four numbers or a flat row-major list of twelve.
inline Extrinsics extrinsics_from_json(const Json& j) {
  std::vector<double> flat;
  if (!j.is_array()) throw MalformedInput("extrinsics must be an array");
  for (const auto& item : j) {
    if (item.is_array()) {
      for (const auto& v : item) flat.push_back(v.get<double>());
    } else {
      flat.push_back(item.get<double>());
    }
  }
  if (flat.size() != 12) throw MalformedInput("extrinsics must hold 12 numbers");
  Extrinsics e;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) e(r, c) = flat[r * 4 + c];
  return e;
}

inline Json pose_set_to_json(const PoseSet& set) {
  Json poses = Json::array();
  for (const auto& p : set.poses) {
    poses.push_back({{"extrinsics", extrinsics_to_json(p.extrinsics())},
                     {"fov_y_deg", p.intrinsics().fov_y_deg()},
                     {"width", p.intrinsics().width},
                     {"height", p.intrinsics().height}});
  }
  return {{"radius", set.radius}, {"seed", set.seed}, {"poses", poses}};
}

inline PoseSet pose_set_from_json(const Json& j) {
  try {
    PoseSet set;
    set.radius = j.at("radius").get<double>();
    set.seed = j.at("seed").get<std::int64_t>();
    for (const auto& p : j.at("poses")) {
      const Intrinsics k = Intrinsics::from_fov(p.at("fov_y_deg").get<double>(), p.at("width").get<int>(),
                                                p.at("height").get<int>());
      set.poses.emplace_back(extrinsics_from_json(p.at("extrinsics")), k);
    }
    if (set.poses.empty()) throw MalformedInput("pose set is empty");
    return set;
  } catch (const Json::exception& e) {
    throw MalformedInput(std::string("pose set: ") + e.what());
  }
}

inline Json scores_to_json(const ScoreVector& s) {
  return {{"f_C", s.f_c}, {"f_Q", s.f_q}, {"f_D", s.f_d}, {"f_T", s.f_t}};
}

inline ScoreVector scores_from_json(const Json& j) {
  return {j.at("f_C").get<double>(), j.at("f_Q").get<double>(), j.at("f_D").get<double>(),
          j.at("f_T").get<double>()};
}

inline Json trajectory_to_json(const Trajectory& t) {
  Json seq = Json::array();
  for (Objective o : t.sequence) seq.push_back(objective_tag(o));
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"step", s.step},
                     {"pose", s.pose},
                     {"objective", objective_tag(s.objective)},
                     {"scores", scores_to_json(s.scores)}});
  }
  return {{"budget", t.budget}, {"sequence", seq}, {"steps", steps}};
}

inline Trajectory trajectory_from_json(const Json& j) {
  try {
    Trajectory t;
    t.budget = j.at("budget").get<std::size_t>();
    for (const auto& o : j.at("sequence")) t.sequence.push_back(parse_objective(o.get<std::string>()));
    for (const auto& s : j.at("steps")) {
      TrajectoryStep step;
      step.step = s.at("step").get<std::size_t>();
      step.pose = s.at("pose").get<std::size_t>();
      step.objective = parse_objective(s.at("objective").get<std::string>());
      step.scores = scores_from_json(s.at("scores"));
      t.steps.push_back(std::move(step));
    }
    return t;
  } catch (const Json::exception& e) {
    throw MalformedInput(std::string("trajectory: ") + e.what());
  }
}

inline std::string format_fixed(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Columns: step,pose_index,f_C,f_Q,f_D,f_T (smoothed, 6 decimals).
inline std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "step,pose_index,f_C,f_Q,f_D,f_T\n";
  for (const auto& s : t.steps) {
    out << s.step << ',' << s.pose << ',' << format_fixed(s.scores.f_c) << ',' << format_fixed(s.scores.f_q)
        << ',' << format_fixed(s.scores.f_d) << ',' << format_fixed(s.scores.f_t) << '\n';
  }
  return out.str();
}

// Columns: step,objective,pose_index,score (raw objective after a
// hypothetical fold of that candidate).
inline std::string candidate_table_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "step,objective,pose_index,score\n";
  for (const auto& s : t.steps) {
    for (const auto& c : s.candidates) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", c.score);
      out << s.step << ',' << objective_tag(s.objective) << ',' << c.pose << ',' << buf << '\n';
    }
  }
  return out.str();
}

struct TransformsFile {
  double camera_angle_x = 0.0;
  std::vector<std::string> file_paths;
  std::vector<Eigen::Matrix4d> transforms;
};

inline Json transforms_to_json(const PoseSet& candidates, const Trajectory& selection) {
  if (candidates.size() == 0) throw InvalidArgument("candidate set is empty");
  Json frames = Json::array();
  for (const auto& s : selection.steps) {
    if (s.pose >= candidates.size())
      throw InvalidArgument("trajectory pose " + std::to_string(s.pose) + " out of range");
    const Eigen::Matrix4d m = candidates[s.pose].to_matrix4();
    Json rows = Json::array();
    for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
    frames.push_back({{"file_path", "images/" + std::to_string(s.pose) + ".png"}, {"transform_matrix", rows}});
  }
  return {{"camera_angle_x", candidates[0].intrinsics().fov_x_rad()}, {"frames", frames}};
}

inline void export_transforms(const PoseSet& candidates, const Trajectory& selection,
                              const std::filesystem::path& out) {
  write_json_file(out, transforms_to_json(candidates, selection));
}

inline TransformsFile parse_transforms(const Json& j) {
  try {
    TransformsFile tf;
    tf.camera_angle_x = j.at("camera_angle_x").get<double>();
    for (const auto& f : j.at("frames")) {
      tf.file_paths.push_back(f.at("file_path").get<std::string>());
      const auto& rows = f.at("transform_matrix");
      if (rows.size() != 4) throw MalformedInput("transform_matrix must have 4 rows");
      Eigen::Matrix4d m;
      for (int r = 0; r < 4; ++r) {
        if (rows[r].size() != 4) throw MalformedInput("transform_matrix rows must have 4 entries");
        for (int c = 0; c < 4; ++c) m(r, c) = rows[r][c].get<double>();
      }
      tf.transforms.push_back(m);
    }
    return tf;
  } catch (const Json::exception& e) {
    throw MalformedInput(std::string("transforms: ") + e.what());
  }
}

inline Json params_to_json(const ObjectiveParams& p) {
  return {{"sigma_q", p.sigma_q}, {"beta_q", p.beta_q}, {"d_q", p.d_q},       {"r_t", p.r_t},
          {"p_t", p.p_t},         {"d_t", p.d_t},       {"alpha1", p.alpha1}, {"alpha2", p.alpha2},
          {"alpha3", p.alpha3}};
}

}  // namespace vantage
