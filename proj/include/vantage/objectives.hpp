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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vantage/error.hpp"
#include "vantage/image_filters.hpp"
#include "vantage/visibility.hpp"

namespace vantage {

struct ObjectiveParams {
  double sigma_q = 1.5;  // LoG standard deviation, pixels
  double beta_q = 1.0;
  double d_q = 0.5;      // per-repeat discount on a face's geometric term
  double r_t = 3.0;      // LBP radius, pixels
  int p_t = 3;           // LBP neighbor count
  double d_t = 0.5;      // discount for revisiting a near-identical pose
  double alpha1 = 1.0;
  double alpha2 = -10.0;
  double alpha3 = 3.0;

  // Throws InvalidArgument whose message starts with the offending field.
  void validate() const {
    if (!(sigma_q > 0.0)) throw InvalidArgument("sigma_q must be positive");
    if (!(d_q > 0.0 && d_q <= 1.0)) throw InvalidArgument("d_q must be in (0, 1]");
    if (!(d_t > 0.0 && d_t <= 1.0)) throw InvalidArgument("d_t must be in (0, 1]");
    if (p_t < 2 || p_t > 24) throw InvalidArgument("p_t must be in [2, 24]");
    if (!(r_t >= 1.0)) throw InvalidArgument("r_t must be at least 1");
    if (!std::isfinite(beta_q)) throw InvalidArgument("beta_q must be finite");
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2) || !std::isfinite(alpha3))
      throw InvalidArgument("alpha1/alpha2/alpha3 must be finite");
  }

  // Pre-smoothing geometric score when no face carries a LoG response.
  double geometric_floor() const { return 1.0 / ((5.0 * sigma_q) * (5.0 * sigma_q)); }
};

// Angle between ray and normal folded so that 90 is head-on, 0 is grazing
// and negative values look at the back of the face.
inline double grazing_angle(const Vec3& ray, const Vec3& normal) {
  const double c = std::clamp(ray.dot(normal) / (ray.norm() * normal.norm()), -1.0, 1.0);
  return std::abs(std::acos(c) * 180.0 / std::numbers::pi) - 90.0;
}

// Soft threshold on the grazing angle: near 0 for rays that see the face
// well, near 1 past the grazing regime.
inline double outlier_score(double theta, const ObjectiveParams& p) {
  const double x = -theta + p.alpha2;
  if (p.alpha1 == 1.0) return 1.0 / (1.0 + std::exp(-x));  // 1 - 1/(1+e^x), without cancellation
  return 1.0 - p.alpha1 / (1.0 + std::exp(x));
}

inline double smooth_clip(double x, double alpha3) {
  constexpr double e = std::numbers::e;
  const double y = 1.0 / (1.0 + std::exp(-alpha3 * e * x + alpha3 * 0.5 * e));
  return std::max(std::min(y, 1.0), 0.0);
}

// Running first and second moments of a face's observing rays plus the sum
// of their outlier scores.
struct RayMoments {
  std::size_t count = 0;
  Vec3 mean = Vec3::Zero();
  Vec3 m2 = Vec3::Zero();  // sum of squared deviations per axis
  double psi_sum = 0.0;

  void add(const Vec3& dir, double psi) {
    ++count;
    const Vec3 delta = dir - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(dir - mean);
    psi_sum += psi;
  }

  // Product of the three population variances.
  double diversity() const {
    if (count == 0) return 0.0;
    const double n = static_cast<double>(count);
    return (m2.x() / n) * (m2.y() / n) * (m2.z() / n);
  }

  double outlier_ratio() const { return count ? psi_sum / static_cast<double>(count) : 0.0; }
};

// Diversity and outlier ratio straight from a list of rays and scores,
// two-pass. Used to cross-check RayMoments.
inline std::pair<double, double> ray_statistics(std::span<const Vec3> rays, std::span<const double> psi) {
  if (rays.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(rays.size());
  // Shifted by the first ray so a constant axis yields exactly zero.
  const Vec3 shift = rays.front();
  Vec3 mean = Vec3::Zero();
  for (const auto& r : rays) mean += r - shift;
  mean /= n;
  Vec3 ss = Vec3::Zero();
  for (const auto& r : rays) ss += (r - shift - mean).cwiseAbs2();
  double psi_sum = 0.0;
  for (double v : psi) psi_sum += v;
  return {ss.x() * ss.y() * ss.z() / (n * n * n), psi_sum / n};
}

// One visited view's entry in the texture ledger.
struct TextureEntry {
  std::size_t pose_index = 0;
  Vec3 view_center = Vec3::Zero();
  double score = 0.0;
  double weight = 1.0;
  bool valid = true;  // false: the view saw only background and scores 0
};

// Views closer than this (degrees, about the origin) count as repeats for
// the texture discount.
inline constexpr double kRepeatViewDeg = 5.0;

// Cumulative per-face state from which the four objectives are computed.
// A value type: planners copy it per candidate and fold into the copy.
class ScoreState {
 public:
  explicit ScoreState(std::size_t face_count)
      : seen_count_(face_count, 0),
        q_weight_(face_count, 1.0),
        max_log_(face_count, 0.0),
        rays_(face_count) {
    if (face_count == 0) throw InvalidArgument("face count must be positive");
  }

  std::size_t face_count() const { return seen_count_.size(); }
  std::size_t seen_faces() const { return seen_total_; }
  bool seen(std::size_t face) const { return seen_count_[face] > 0; }
  std::uint32_t times_seen(std::size_t face) const { return seen_count_[face]; }
  double q_weight(std::size_t face) const { return q_weight_[face]; }
  double max_log_response(std::size_t face) const { return max_log_[face]; }
  const RayMoments& ray_moments(std::size_t face) const { return rays_[face]; }
  const std::vector<TextureEntry>& texture_ledger() const { return textures_; }
  const std::vector<std::size_t>& visited() const { return visited_; }

  bool has_visited(std::size_t pose_index) const {
    return std::find(visited_.begin(), visited_.end(), pose_index) != visited_.end();
  }

  // Folds a measured view into the state in place.
  void fold(const ViewObservation& obs, const ObjectiveParams& params) {
    if (has_visited(obs.pose_index))
      throw InvalidArgument("pose " + std::to_string(obs.pose_index) + " already folded");
    for (const auto& fo : obs.faces) {
      if (fo.face >= face_count())
        throw InvalidArgument("observation references face " + std::to_string(fo.face) +
                              " beyond face count " + std::to_string(face_count()));
      const std::size_t j = fo.face;
      if (seen_count_[j] == 0) {
        ++seen_total_;
      } else {
        q_weight_[j] *= params.d_q;
      }
      ++seen_count_[j];
      max_log_[j] = std::max(max_log_[j], fo.log_response);
      for (const auto& ray : fo.rays) rays_[j].add(ray, outlier_score(grazing_angle(ray, fo.normal), params));
    }
    TextureEntry entry{obs.pose_index, obs.view_center, obs.texture_valid ? obs.texture : 0.0, 1.0,
                       obs.texture_valid};
    for (const auto& prior : textures_) {
      if (angular_distance_deg(prior.view_center, obs.view_center) < kRepeatViewDeg)
        entry.weight *= params.d_t;
    }
    textures_.push_back(entry);
    visited_.push_back(obs.pose_index);
  }

 private:
  std::vector<std::uint32_t> seen_count_;
  std::vector<double> q_weight_;
  std::vector<double> max_log_;
  std::vector<RayMoments> rays_;
  std::vector<TextureEntry> textures_;
  std::vector<std::size_t> visited_;
  std::size_t seen_total_ = 0;
};

inline ScoreState fold_observation(ScoreState state, const ViewObservation& obs,
                                   const ObjectiveParams& params) {
  state.fold(obs, params);
  return state;
}

// Share of faces seen by at least one visited view.
inline double coverage_score(const ScoreState& state) {
  return static_cast<double>(state.seen_faces()) / static_cast<double>(state.face_count());
}

namespace detail {

inline double geometric_from_responses(const ScoreState& state, const std::vector<double>& response,
                                       const ObjectiveParams& p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < state.face_count(); ++j) {
    const double gate = state.seen(j) ? 1.0 : 0.0;
    sum += response[j] * p.beta_q * gate * state.q_weight(j) + 1.0;
  }
  return sum / (static_cast<double>(state.face_count()) * (5.0 * p.sigma_q) * (5.0 * p.sigma_q));
}

inline double texture_mean(const std::vector<TextureEntry>& ledger) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& e : ledger) {
    num += e.weight * e.score;
    den += e.weight;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace detail

// Visibility-gated LoG magnitude over face normals, using each face's
// strongest response across visited views and its repeat discount.
inline double geometric_complexity_score(const ScoreState& state, const ObjectiveParams& p) {
  std::vector<double> response(state.face_count());
  for (std::size_t j = 0; j < state.face_count(); ++j) response[j] = state.max_log_response(j);
  return detail::geometric_from_responses(state, response, p);
}

// Same quantity recomputed from the normal maps of the visited views.
inline double geometric_complexity_score(const ScoreState& state, std::span<const ViewBuffers> views,
                                         const ObjectiveParams& p) {
  std::vector<double> response(state.face_count(), 0.0);
  for (const auto& view : views) {
    const auto per_face = face_log_response(view, p.sigma_q);
    for (std::size_t j = 0; j < per_face.size() && j < response.size(); ++j)
      response[j] = std::max(response[j], per_face[j]);
  }
  return detail::geometric_from_responses(state, response, p);
}

// Discount-weighted mean of per-view LBP texture scores.
inline double textural_complexity_score(const ScoreState& state) {
  return detail::texture_mean(state.texture_ledger());
}

// Same quantity recomputed from the visited views' color buffers, in visit
// order; weights come from the state's ledger.
inline double textural_complexity_score(const ScoreState& state, std::span<const ViewBuffers> images,
                                        const ObjectiveParams& p) {
  const auto& ledger = state.texture_ledger();
  if (images.size() != ledger.size())
    throw InvalidArgument("expected one image per visited view");
  std::vector<TextureEntry> recomputed = ledger;
  for (std::size_t v = 0; v < images.size(); ++v) {
    const TextureMeasure m = texture_score(images[v], p.r_t, p.p_t);
    recomputed[v].score = m.valid ? m.score : 0.0;
  }
  return detail::texture_mean(recomputed);
}

// Mean over faces of (ray-direction variance product) x (mean outlier score).
inline double ray_diversity_score(const ScoreState& state) {
  double sum = 0.0;
  for (std::size_t j = 0; j < state.face_count(); ++j) {
    const RayMoments& m = state.ray_moments(j);
    sum += m.diversity() * m.outlier_ratio();
  }
  return sum / static_cast<double>(state.face_count());
}

// The four objectives before smoothing.
struct RawScores {
  double coverage = 0.0;
  double geometric = 0.0;
  double diversity = 0.0;
  double texture = 0.0;
};

struct ScoreVector {
  double f_c = 0.0;
  double f_q = 0.0;
  double f_d = 0.0;
  double f_t = 0.0;
};

inline RawScores raw_scores(const ScoreState& state, const ObjectiveParams& p) {
  return {coverage_score(state), geometric_complexity_score(state, p), ray_diversity_score(state),
          textural_complexity_score(state)};
}

inline ScoreVector smooth(const RawScores& raw, const ObjectiveParams& p) {
  return {smooth_clip(raw.coverage, p.alpha3), smooth_clip(raw.geometric, p.alpha3),
          smooth_clip(raw.diversity, p.alpha3), smooth_clip(raw.texture, p.alpha3)};
}

inline ScoreVector score_vector(const ScoreState& state, const ObjectiveParams& p) {
  return smooth(raw_scores(state, p), p);
}

// Settings for turning a pose into a measured observation.
struct RenderSettings {
  int resolution = 128;          // visibility, rays and LoG
  int texture_resolution = 256;  // LBP texture

  void validate() const {
    if (resolution < kMinRenderSize) throw InvalidArgument("resolution must be at least 16");
    if (texture_resolution < kMinRenderSize)
      throw InvalidArgument("texture_resolution must be at least 16");
  }
};

// Renders a pose and attaches everything fold() needs: visible faces with
// rays, per-face LoG responses and the view's texture score.
inline ViewObservation measure_view(const MeshScene& scene, const CameraPose& pose, std::size_t pose_index,
                                    const ObjectiveParams& params, const RenderSettings& settings) {
  const ViewBuffers buffers = render_view(scene, pose, settings.resolution);
  ViewObservation obs = observe(buffers, pose_index);
  obs.view_center = pose.center();
  const auto response = face_log_response(buffers, params.sigma_q);
  for (auto& fo : obs.faces) fo.log_response = response[fo.face];
  const TextureMeasure tex =
      settings.texture_resolution == settings.resolution
          ? texture_score(buffers, params.r_t, params.p_t)
          : texture_score(render_view(scene, pose, settings.texture_resolution), params.r_t, params.p_t);
  obs.texture = tex.score;
  obs.texture_valid = tex.valid;
  return obs;
}

}  // namespace vantage
