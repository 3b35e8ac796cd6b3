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

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace vantage {
namespace {

TEST(GenerateScene, FaceCounts) {
  EXPECT_EQ(generate_scene(SceneSpec{}).face_count(), 12u);
  SceneSpec ico;
  ico.kind = SceneKind::kIcosphere;
  for (int s = 0; s <= 3; ++s) {
    ico.subdivisions = s;
    EXPECT_EQ(generate_scene(ico).face_count(), 20u << (2 * s));
  }
  SceneSpec dihedral;
  dihedral.kind = SceneKind::kDihedral;
  EXPECT_EQ(generate_scene(dihedral).face_count(), 4u);
  SceneSpec blocks;
  blocks.kind = SceneKind::kBlocks;
  blocks.blocks = 5;
  EXPECT_EQ(generate_scene(blocks).face_count(), 60u);
}

TEST(GenerateScene, AllFamiliesAreNormalizedAndDeterministic) {
  for (const SceneSpec& spec : reference_scene_specs()) {
    const TriangleMesh a = generate_scene(spec);
    const TriangleMesh b = generate_scene(spec);
    EXPECT_EQ(a.vertices(), b.vertices()) << spec.name();
    EXPECT_EQ(a.faces(), b.faces()) << spec.name();
    EXPECT_EQ(a.face_colors(), b.face_colors()) << spec.name();
    const auto [lo, hi] = a.bounds();
    EXPECT_NEAR(((lo + hi) / 2).norm(), 0.0, 1e-12) << spec.name();
    EXPECT_NEAR((hi - lo).maxCoeff(), 2.0, 1e-12) << spec.name();
    for (const auto& n : a.face_normals()) EXPECT_NEAR(n.norm(), 1.0, 1e-12);
  }
}

TEST(GenerateScene, SeedsChangeBlocksAndColors) {
  SceneSpec a = testing::spec_of(SceneKind::kBlocks);
  SceneSpec b = a;
  b.seed = a.seed + 1;
  EXPECT_NE(generate_scene(a).vertices(), generate_scene(b).vertices());
  EXPECT_NE(generate_scene(a).face_colors(), generate_scene(b).face_colors());
}

TEST(GenerateScene, CheckerBallHasTwoColors) {
  const TriangleMesh m = generate_scene(testing::spec_of(SceneKind::kCheckerBall));
  std::set<std::array<double, 3>> colors;
  for (const auto& c : m.face_colors()) colors.insert({c.x(), c.y(), c.z()});
  EXPECT_EQ(colors.size(), 2u);
}

TEST(GenerateScene, RejectsInvalidSpecs) {
  SceneSpec s;
  s.kind = SceneKind::kIcosphere;
  s.subdivisions = -1;
  EXPECT_THROW(generate_scene(s), InvalidArgument);
  s = SceneSpec{};
  s.kind = SceneKind::kDihedral;
  s.angle_deg = 0.0;
  EXPECT_THROW(generate_scene(s), InvalidArgument);
  s = SceneSpec{};
  s.kind = SceneKind::kBlocks;
  s.blocks = 0;
  EXPECT_THROW(generate_scene(s), InvalidArgument);
  s = SceneSpec{};
  s.kind = SceneKind::kCheckerBall;
  s.pitch_deg = 0.0;
  EXPECT_THROW(generate_scene(s), InvalidArgument);
}

TEST(GenerateScene, NamesAndKindsRoundTrip) {
  for (const SceneSpec& spec : reference_scene_specs()) {
    EXPECT_EQ(parse_scene_kind(scene_kind_name(spec.kind)), spec.kind);
    EXPECT_EQ(parse_color_mode(color_mode_name(spec.color_mode)), spec.color_mode);
  }
  EXPECT_EQ(testing::spec_of(SceneKind::kIcosphere).name(), "icosphere2");
  EXPECT_THROW(parse_scene_kind("teapot"), InvalidArgument);
}

TEST(RandomWalk, DistinctNearestNeighborSteps) {
  const PoseSet poses = generate_sphere_poses(3.0, 30, SphereMode::kRandom, 1);
  const auto walks = random_walk_trajectories(poses, 30, 4, 5);
  ASSERT_EQ(walks.size(), 4u);
  for (const auto& walk : walks) {
    ASSERT_EQ(walk.size(), 30u);
    EXPECT_EQ(std::set<std::size_t>(walk.begin(), walk.end()).size(), 30u);
    for (std::size_t i = 1; i < walk.size(); ++i) {
      // The step is at most the 8th-nearest distance among poses still open.
      std::vector<double> open;
      for (std::size_t k = 0; k < poses.size(); ++k)
        if (std::find(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(i), k) ==
            walk.begin() + static_cast<std::ptrdiff_t>(i))
          open.push_back(angular_distance_deg(poses[walk[i - 1]].center(), poses[k].center()));
      std::sort(open.begin(), open.end());
      const double limit = open[std::min<std::size_t>(7, open.size() - 1)];
      EXPECT_LE(angular_distance_deg(poses[walk[i - 1]].center(), poses[walk[i]].center()), limit);
    }
  }
  EXPECT_EQ(walks, random_walk_trajectories(poses, 30, 4, 5));
  EXPECT_NE(walks, random_walk_trajectories(poses, 30, 4, 6));
}

TEST(RandomWalk, LengthOneAndBounds) {
  const PoseSet poses = generate_sphere_poses(3.0, 10, SphereMode::kRandom, 1);
  const auto walks = random_walk_trajectories(poses, 1, 3, 2);
  for (const auto& w : walks) {
    ASSERT_EQ(w.size(), 1u);
    EXPECT_LT(w[0], 10u);
  }
  EXPECT_THROW(random_walk_trajectories(poses, 11, 1, 0), InvalidArgument);
  EXPECT_THROW(random_walk_trajectories(poses, 0, 1, 0), InvalidArgument);
}

struct TupleFixture : ::testing::Test {
  MeshScene scene{generate_scene(testing::spec_of(SceneKind::kBlocks))};
  PoseSet poses = generate_sphere_poses(3.0, 12, SphereMode::kRandom, 3);
  RenderSettings settings{32, 48};
  ViewCache cache{scene, poses, ObjectiveParams{}, settings};
  testing::TempDir dir{"tuples"};
};

TEST_F(TupleFixture, CountsOnePerPrefixAndCandidate) {
  TupleExportOptions opt;
  opt.candidates_per_prefix = 2;
  opt.scene_name = "blocks";
  const auto walks = random_walk_trajectories(poses, 3, 1, 4);
  const auto records = export_training_tuples(cache, walks, dir.path(), opt);
  ASSERT_EQ(records.size(), 6u);
  std::set<std::string> ids;
  for (const auto& r : records) {
    ids.insert(r.id);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / r.path));
    EXPECT_EQ(std::find(r.visited.begin(), r.visited.end(), r.candidate), r.visited.end());
    EXPECT_GE(r.label_n1.f_c, r.label_n.f_c);
    for (double v : {r.label_n.f_c, r.label_n.f_q, r.label_n.f_d, r.label_n.f_t, r.label_n1.f_c, r.label_n1.f_q,
                     r.label_n1.f_d, r.label_n1.f_t}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_EQ(ids.size(), 6u);
  for (std::size_t k : walks[0]) EXPECT_TRUE(std::filesystem::exists(dir.path() / "images" / (std::to_string(k) + ".png")));
}

TEST_F(TupleFixture, TupleFilesReferenceOnlyVisitedImages) {
  TupleExportOptions opt;
  opt.candidates_per_prefix = 3;
  const auto walks = random_walk_trajectories(poses, 4, 2, 6);
  const auto records = export_training_tuples(cache, walks, dir.path(), opt);
  ASSERT_EQ(records.size(), 2u * 4u * 3u);
  for (const auto& r : records) {
    const Json doc = read_json_file(dir.path() / r.path);
    EXPECT_EQ(doc.at("id"), r.id);
    EXPECT_EQ(doc.at("visited_poses").size(), r.visited.size());
    EXPECT_EQ(doc.at("visited_images").size(), r.visited.size());
    const std::string candidate_image = "images/" + std::to_string(r.candidate) + ".png";
    for (const auto& img : doc.at("visited_images")) {
      EXPECT_NE(img.get<std::string>(), candidate_image);
      EXPECT_TRUE(std::filesystem::exists(dir.path() / img.get<std::string>()));
    }
    EXPECT_FALSE(doc.contains("candidate_image"));
    EXPECT_TRUE(extrinsics_from_json(doc.at("candidate_pose")).isApprox(poses[r.candidate].extrinsics(), 1e-12));
    const ScoreVector n1 = scores_from_json(doc.at("label_F_n1"));
    EXPECT_EQ(n1.f_q, r.label_n1.f_q);
  }
}

TEST_F(TupleFixture, LabelsMatchFreshRecomputation) {
  TupleExportOptions opt;
  opt.candidates_per_prefix = 4;
  const auto walks = random_walk_trajectories(poses, 5, 2, 7);
  const auto records = export_training_tuples(cache, walks, dir.path(), opt);
  Rng rng(8);
  for (std::size_t i : rng.sample_without_replacement(records.size(), 10)) {
    const auto& r = records[i];
    const auto [n, n1] = recompute_labels(scene, poses, r.visited, r.candidate, ObjectiveParams{}, settings);
    for (auto [a, b] : {std::pair{n.f_c, r.label_n.f_c}, {n.f_q, r.label_n.f_q}, {n.f_d, r.label_n.f_d},
                        {n.f_t, r.label_n.f_t}, {n1.f_c, r.label_n1.f_c}, {n1.f_q, r.label_n1.f_q},
                        {n1.f_d, r.label_n1.f_d}, {n1.f_t, r.label_n1.f_t}})
      EXPECT_NEAR(a, b, 1e-9) << r.id;
  }
}

TEST_F(TupleFixture, CandidateSamplingCapsAtUnseenCount) {
  TupleExportOptions opt;
  opt.candidates_per_prefix = 16;
  const std::vector<std::size_t> visited = {0, 1, 2};
  const auto picks = sample_prefix_candidates(12, visited, 0, 3, opt);
  EXPECT_EQ(picks.size(), 9u);
  EXPECT_EQ(picks, sample_prefix_candidates(12, visited, 0, 3, opt));
}

TEST(GenerateDataset, LayoutAndManifest) {
  testing::TempDir dir("dataset");
  DatasetConfig cfg;
  cfg.scenes = {SceneSpec{}, testing::spec_of(SceneKind::kDihedral)};
  cfg.train_poses = 8;
  cfg.val_poses = 3;
  cfg.test_poses = 4;
  cfg.walks_per_scene = 1;
  cfg.walk_length = 3;
  cfg.candidates_per_prefix = 2;
  cfg.render = RenderSettings{24, 24};
  const DatasetSummary summary = generate_dataset(cfg, dir.path());
  EXPECT_EQ(summary.tuple_count, 2u * 3u * 2u);
  const Json manifest = read_json_file(dir.path() / "manifest.json");
  EXPECT_EQ(manifest.at("tuple_count"), summary.tuple_count);
  EXPECT_EQ(manifest.at("tuples").size(), summary.tuple_count);
  EXPECT_EQ(manifest.at("params").at("alpha2"), -10.0);
  for (const auto& t : manifest.at("tuples")) EXPECT_TRUE(std::filesystem::exists(dir.path() / t.at("path").get<std::string>()));
  for (const auto& name : summary.scene_names) {
    const auto scene_dir = dir.path() / "scenes" / name;
    for (const char* f : {"mesh.obj", "poses.json", "poses_val.json", "poses_test.json"})
      EXPECT_TRUE(std::filesystem::exists(scene_dir / f)) << name << "/" << f;
    EXPECT_EQ(pose_set_from_json(read_json_file(scene_dir / "poses.json")).size(), 8u);
    EXPECT_EQ(pose_set_from_json(read_json_file(scene_dir / "poses_test.json")).size(), 4u);
    EXPECT_EQ(load_mesh_obj(scene_dir / "mesh.obj").face_count(), generate_scene(cfg.scenes[&name - &summary.scene_names[0]]).face_count());
  }
  // Same config, same bytes.
  testing::TempDir again("dataset");
  generate_dataset(cfg, again.path());
  EXPECT_EQ(testing::read_file(dir.path() / "manifest.json"), testing::read_file(again.path() / "manifest.json"));
  cfg.walk_length = 9;
  EXPECT_THROW(generate_dataset(cfg, again.path()), InvalidArgument);
}

TEST(Serialization, PoseSetRoundTrip) {
  const PoseSet set = generate_sphere_poses(3.0, 7, SphereMode::kRandom, 9);
  const PoseSet back = pose_set_from_json(pose_set_to_json(set));
  ASSERT_EQ(back.size(), set.size());
  EXPECT_EQ(back.seed, set.seed);
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_TRUE(back[i].extrinsics().isApprox(set[i].extrinsics(), 1e-15));
    EXPECT_NEAR(back[i].intrinsics().focal, set[i].intrinsics().focal, 1e-12);
  }
}

TEST(Serialization, ExtrinsicsAcceptFlatAndRejectBadShapes) {
  const Extrinsics e = generate_sphere_poses(3.0, 1, SphereMode::kRandom, 1)[0].extrinsics();
  Json flat = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) flat.push_back(e(r, c));
  EXPECT_EQ(extrinsics_from_json(flat), e);
  EXPECT_EQ(extrinsics_from_json(extrinsics_to_json(e)), e);
  EXPECT_THROW(extrinsics_from_json(Json::array({1, 2, 3})), MalformedInput);
}

TEST(Serialization, TrajectoryRoundTrip) {
  const MeshScene scene(generate_scene(SceneSpec{}));
  const PoseSet poses = generate_sphere_poses(3.0, 12, SphereMode::kRandom, 2);
  const ViewCache cache(scene, poses, {}, RenderSettings{32, 32});
  PlannerConfig c;
  c.budget = 7;
  const Trajectory t = plan_trajectory(cache, c);
  const Json j = trajectory_to_json(t);
  const Trajectory back = trajectory_from_json(j);
  EXPECT_EQ(trajectory_to_json(back).dump(), j.dump());
  EXPECT_EQ(back.poses(), t.poses());
  const std::string csv = trajectory_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,pose_index,f_C,f_Q,f_D,f_T");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}

TEST(Transforms, RoundTripRecoversExtrinsics) {
  const MeshScene scene(generate_scene(SceneSpec{}));
  const PoseSet poses = generate_sphere_poses(3.0, 15, SphereMode::kRandom, 4);
  const ViewCache cache(scene, poses, {}, RenderSettings{16, 16});
  const Trajectory t = plan_random(cache, 6, 1);
  testing::TempDir dir("transforms");
  export_transforms(poses, t, dir.path() / "transforms.json");
  const TransformsFile tf = parse_transforms(read_json_file(dir.path() / "transforms.json"));
  ASSERT_EQ(tf.transforms.size(), 6u);
  EXPECT_NEAR(tf.camera_angle_x, poses[0].intrinsics().fov_x_rad(), 1e-12);
  for (std::size_t i = 0; i < 6; ++i) {
    const Extrinsics& e = poses[t.steps[i].pose].extrinsics();
    EXPECT_LT((tf.transforms[i].topRows<3>() - e).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(tf.transforms[i].row(3), Eigen::RowVector4d(0, 0, 0, 1));
    EXPECT_EQ(tf.file_paths[i], "images/" + std::to_string(t.steps[i].pose) + ".png");
  }
  EXPECT_THROW(parse_transforms(Json::object()), MalformedInput);
}

}  // namespace
}  // namespace vantage
