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

// Plans a default-ensemble trajectory on each procedural reference scene and
// prints the final smoothed scores next to a random baseline.

#include <iostream>

#include "vantage/vantage.hpp"

int main() {
  using namespace vantage;
  const PoseSet candidates = generate_sphere_poses(kDefaultSphereRadius, 60, SphereMode::kRandom, 7);
  PlannerConfig config;
  config.budget = 12;
  config.threads = default_thread_count();
  for (const SceneSpec& spec : reference_scene_specs()) {
    const MeshScene scene(generate_scene(spec));
    const ViewCache cache(scene, candidates, config.params, RenderSettings{});
    cache.prefetch_all(config.threads);
    const Trajectory planned = plan_trajectory(cache, config);
    const Trajectory random = plan_random(cache, config.budget, 1);
    const ScoreVector& a = planned.final_scores();
    const ScoreVector& b = random.final_scores();
    std::cout << spec.name() << "  planned C=" << format_fixed(a.f_c, 4) << " Q=" << format_fixed(a.f_q, 4)
              << " T=" << format_fixed(a.f_t, 4) << "   random C=" << format_fixed(b.f_c, 4)
              << " Q=" << format_fixed(b.f_q, 4) << " T=" << format_fixed(b.f_t, 4) << '\n';
  }
}
