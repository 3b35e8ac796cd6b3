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

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vantage/error.hpp"
#include "vantage/geometry.hpp"
#include "vantage/objectives.hpp"
#include "vantage/parallel.hpp"
#include "vantage/rng.hpp"
#include "vantage/visibility.hpp"

namespace vantage {

enum class Objective { kInit, kCoverage, kGeometric, kDiversity, kTexture, kRandom };

inline std::string_view objective_tag(Objective o) {
  switch (o) {
    case Objective::kInit: return "INIT";
    case Objective::kCoverage: return "C";
    case Objective::kGeometric: return "Q";
    case Objective::kDiversity: return "D";
    case Objective::kTexture: return "T";
    case Objective::kRandom: return "RANDOM";
  }
  return "?";
}

inline Objective parse_objective(std::string_view tag) {
  for (Objective o : {Objective::kInit, Objective::kCoverage, Objective::kGeometric,
                      Objective::kDiversity, Objective::kTexture, Objective::kRandom}) {
    if (objective_tag(o) == tag) return o;
  }
  throw InvalidArgument("unknown objective tag '" + std::string(tag) + "'");
}

// Pre-smoothing value of one objective.
inline double objective_value(const ScoreState& state, Objective o, const ObjectiveParams& p) {
  switch (o) {
    case Objective::kCoverage: return coverage_score(state);
    case Objective::kGeometric: return geometric_complexity_score(state, p);
    case Objective::kDiversity: return ray_diversity_score(state);
    case Objective::kTexture: return textural_complexity_score(state);
    default: throw InvalidArgument("objective " + std::string(objective_tag(o)) + " is not scorable");
  }
}

// Lazily measured observations for every candidate pose. Each entry is
// computed at most once; concurrent get() calls are safe.
class ViewCache {
 public:
  ViewCache(const MeshScene& scene, const PoseSet& poses, ObjectiveParams params, RenderSettings settings)
      : scene_(&scene),
        poses_(&poses),
        params_(params),
        settings_(settings),
        entries_(std::make_unique<Entry[]>(poses.size())) {
    params_.validate();
    settings_.validate();
  }

  const ViewObservation& get(std::size_t pose_index) const {
    if (pose_index >= poses_->size())
      throw InvalidArgument("pose index " + std::to_string(pose_index) + " out of range");
    Entry& e = entries_[pose_index];
    std::call_once(e.once, [&] {
      e.obs = measure_view(*scene_, (*poses_)[pose_index], pose_index, params_, settings_);
    });
    return e.obs;
  }

  void prefetch_all(std::size_t threads) const {
    parallel_for(size(), threads, [&](std::size_t k) { get(k); });
  }

  std::size_t size() const { return poses_->size(); }
  const MeshScene& scene() const { return *scene_; }
  const PoseSet& poses() const { return *poses_; }
  const ObjectiveParams& params() const { return params_; }
  const RenderSettings& settings() const { return settings_; }

 private:
  struct Entry {
    std::once_flag once;
    ViewObservation obs;
  };
  const MeshScene* scene_;
  const PoseSet* poses_;
  ObjectiveParams params_;
  RenderSettings settings_;
  std::unique_ptr<Entry[]> entries_;
};

enum class SequenceIndexing {
  kRestart,       // first greedy step uses sequence[0]
  kModuloStep,    // sequence[step % len], steps counted from 1
};

struct PlannerConfig {
  std::size_t budget = 6;
  std::vector<Objective> sequence = {Objective::kCoverage,  Objective::kGeometric, Objective::kGeometric,
                                     Objective::kDiversity, Objective::kDiversity, Objective::kTexture};
  std::size_t n_init = 3;
  ObjectiveParams params;
  std::int64_t seed = 0;
  SequenceIndexing indexing = SequenceIndexing::kRestart;
  bool record_candidates = false;
  std::size_t threads = 1;

  void validate(std::size_t candidate_count) const {
    if (budget == 0) throw InvalidArgument("budget must be positive");
    if (n_init > budget)
      throw InvalidArgument("n_init (" + std::to_string(n_init) + ") exceeds budget (" +
                            std::to_string(budget) + ")");
    if (budget > candidate_count)
      throw InvalidArgument("budget (" + std::to_string(budget) + ") exceeds candidate count (" +
                            std::to_string(candidate_count) + ")");
    if (sequence.empty()) throw InvalidArgument("sequence must not be empty");
    for (Objective o : sequence) {
      if (o == Objective::kInit || o == Objective::kRandom)
        throw InvalidArgument("sequence entries must be C, Q, D or T");
    }
    params.validate();
  }

  // Objective optimized at 1-based step `step` (> n_init).
  Objective active_objective(std::size_t step) const {
    const std::size_t len = sequence.size();
    if (indexing == SequenceIndexing::kModuloStep) return sequence[step % len];
    return sequence[(step - n_init - 1) % len];
  }
};

struct CandidateScore {
  std::size_t pose = 0;
  double score = 0.0;
};

struct TrajectoryStep {
  std::size_t step = 0;  // 1-based
  std::size_t pose = 0;
  Objective objective = Objective::kInit;
  ScoreVector scores;   // smoothed, after folding this step's pose
  double objective_score = std::numeric_limits<double>::quiet_NaN();  // raw winning score, greedy steps
  std::vector<CandidateScore> candidates;  // only when recording
};

struct Trajectory {
  std::size_t budget = 0;
  std::vector<Objective> sequence;
  std::vector<TrajectoryStep> steps;

  std::vector<std::size_t> poses() const {
    std::vector<std::size_t> out;
    for (const auto& s : steps) out.push_back(s.pose);
    return out;
  }
  const ScoreVector& final_scores() const { return steps.back().scores; }
};

// Picks, cycling through x, y, z, the unselected candidate whose center has
// the largest absolute coordinate on that axis. Ties go to the lower index.
inline std::vector<std::size_t> pseudo_coverage_init(const PoseSet& candidates, std::size_t n_init) {
  if (candidates.size() == 0) throw InvalidArgument("candidate set is empty");
  if (n_init > candidates.size())
    throw InvalidArgument("n_init (" + std::to_string(n_init) + ") exceeds candidate count");
  std::vector<std::size_t> picks;
  std::vector<bool> taken(candidates.size(), false);
  for (std::size_t s = 0; s < n_init; ++s) {
    const int axis = static_cast<int>(s % 3);
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (taken[k]) continue;
      if (!best || std::abs(candidates[k].center()[axis]) > std::abs(candidates[*best].center()[axis]))
        best = k;
    }
    taken[*best] = true;
    picks.push_back(*best);
  }
  return picks;
}

namespace detail {

// Scores every unvisited candidate on `objective` after a hypothetical fold.
inline std::vector<CandidateScore> score_candidates(const ViewCache& cache, const ScoreState& state,
                                                    Objective objective, std::size_t threads) {
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < cache.size(); ++k)
    if (!state.has_visited(k)) open.push_back(k);
  std::vector<CandidateScore> scores(open.size());
  parallel_for(open.size(), threads, [&](std::size_t i) {
    ScoreState trial = state;
    trial.fold(cache.get(open[i]), cache.params());
    scores[i] = {open[i], objective_value(trial, objective, cache.params())};
  });
  return scores;
}

// Highest score; ties go to the lowest pose index (scores arrive sorted by index).
inline CandidateScore select_best(const std::vector<CandidateScore>& scores) {
  CandidateScore best = scores.front();
  for (const auto& c : scores)
    if (c.score > best.score) best = c;
  return best;
}

}  // namespace detail

// Greedy budget-constrained planning: pseudo-coverage initialization, then
// one objective per step following the configured sequence.
inline Trajectory plan_trajectory(const ViewCache& cache, const PlannerConfig& config) {
  config.validate(cache.size());
  Trajectory traj;
  traj.budget = config.budget;
  traj.sequence = config.sequence;
  ScoreState state(cache.scene().face_count());
  const auto& p = cache.params();

  for (std::size_t pose : pseudo_coverage_init(cache.poses(), config.n_init)) {
    state.fold(cache.get(pose), p);
    TrajectoryStep step;
    step.step = traj.steps.size() + 1;
    step.pose = pose;
    step.objective = Objective::kInit;
    step.scores = score_vector(state, p);
    traj.steps.push_back(std::move(step));
  }
  for (std::size_t s = config.n_init + 1; s <= config.budget; ++s) {
    const Objective objective = config.active_objective(s);
    auto scores = detail::score_candidates(cache, state, objective, config.threads);
    const CandidateScore best = detail::select_best(scores);
    state.fold(cache.get(best.pose), p);
    TrajectoryStep step;
    step.step = s;
    step.pose = best.pose;
    step.objective = objective;
    step.scores = score_vector(state, p);
    step.objective_score = best.score;
    if (config.record_candidates) step.candidates = std::move(scores);
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

// B distinct indices out of `count`, uniformly without replacement.
inline std::vector<std::size_t> random_selection(std::size_t count, std::size_t budget, std::int64_t seed) {
  if (budget > count)
    throw InvalidArgument("budget (" + std::to_string(budget) + ") exceeds candidate count (" +
                          std::to_string(count) + ")");
  Rng rng(static_cast<std::uint64_t>(seed));
  return rng.sample_without_replacement(count, budget);
}

// Random baseline, scored with the same objectives as the planner.
inline Trajectory plan_random(const ViewCache& cache, std::size_t budget, std::int64_t seed) {
  Trajectory traj;
  traj.budget = budget;
  ScoreState state(cache.scene().face_count());
  for (std::size_t pose : random_selection(cache.size(), budget, seed)) {
    state.fold(cache.get(pose), cache.params());
    TrajectoryStep step;
    step.step = traj.steps.size() + 1;
    step.pose = pose;
    step.objective = Objective::kRandom;
    step.scores = score_vector(state, cache.params());
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

struct AuditReport {
  std::vector<std::string> violations;
  std::size_t greedy_steps_checked = 0;
  bool ok() const { return violations.empty(); }
};

// Replays a trajectory and checks that it is a valid greedy plan under
// `config`: correct initialization, schedule and length, distinct poses,
// and at every greedy step no unvisited candidate beats the chosen one.
inline AuditReport audit_trajectory(const ViewCache& cache, const Trajectory& traj, const PlannerConfig& config,
                                    double score_tolerance = 1e-9) {
  AuditReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };
  if (traj.steps.size() != config.budget)
    fail("trajectory has " + std::to_string(traj.steps.size()) + " steps, budget is " +
         std::to_string(config.budget));
  const auto init = pseudo_coverage_init(cache.poses(), std::min(config.n_init, cache.size()));
  ScoreState state(cache.scene().face_count());
  const auto& p = cache.params();
  for (const auto& step : traj.steps) {
    const std::string at = "step " + std::to_string(step.step) + ": ";
    if (step.pose >= cache.size()) {
      fail(at + "pose index out of range");
      return report;
    }
    if (state.has_visited(step.pose)) {
      fail(at + "pose " + std::to_string(step.pose) + " repeated");
      return report;
    }
    if (step.step <= config.n_init) {
      if (step.objective != Objective::kInit) fail(at + "expected INIT");
      if (step.step - 1 < init.size() && init[step.step - 1] != step.pose)
        fail(at + "initialization pose differs from axis extremum");
    } else {
      const Objective expected = config.active_objective(step.step);
      if (step.objective != expected)
        fail(at + "objective " + std::string(objective_tag(step.objective)) + ", schedule says " +
             std::string(objective_tag(expected)));
      const auto scores = detail::score_candidates(cache, state, expected, config.threads);
      double chosen = std::numeric_limits<double>::quiet_NaN();
      double rival = -std::numeric_limits<double>::infinity();
      std::size_t rival_pose = 0;
      for (const auto& c : scores) {
        if (c.pose == step.pose) {
          chosen = c.score;
        } else if (c.score > rival) {
          rival = c.score;
          rival_pose = c.pose;
        }
      }
      if (chosen < rival)
        fail(at + "candidate " + std::to_string(rival_pose) + " scores " + std::to_string(rival) +
             " > chosen " + std::to_string(chosen));
      ++report.greedy_steps_checked;
    }
    state.fold(cache.get(step.pose), p);
    const ScoreVector now = score_vector(state, p);
    if (std::abs(now.f_c - step.scores.f_c) > score_tolerance ||
        std::abs(now.f_q - step.scores.f_q) > score_tolerance ||
        std::abs(now.f_d - step.scores.f_d) > score_tolerance ||
        std::abs(now.f_t - step.scores.f_t) > score_tolerance)
      fail(at + "recorded scores differ from recomputation");
  }
  return report;
}

}  // namespace vantage
