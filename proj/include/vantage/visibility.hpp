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
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vantage/bvh.hpp"
#include "vantage/geometry.hpp"

namespace vantage {

// A mesh together with its acceleration structure. Immutable; safe to
// share between threads.
class MeshScene {
 public:
  explicit MeshScene(TriangleMesh mesh) : mesh_(std::move(mesh)), bvh_(mesh_) {}

  const TriangleMesh& mesh() const { return mesh_; }
  std::size_t face_count() const { return mesh_.face_count(); }

  std::optional<RayHit> cast_ray(const Vec3& origin, const Vec3& dir) const {
    return bvh_.cast(mesh_, origin, dir);
  }

 private:
  TriangleMesh mesh_;
  Bvh bvh_;
};

inline constexpr std::int32_t kBackground = -1;
inline constexpr int kMinRenderSize = 16;

// Per-pixel render outputs, row-major with y pointing down.
struct ViewBuffers {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> face_id;  // kBackground where no face was hit
  std::vector<Vec3> normal_map;       // face normal, zero on background
  std::vector<Color> color;           // shaded face color, white on background
  std::vector<Vec3> ray_dir;          // unit direction from camera center

  std::size_t pixel_count() const { return face_id.size(); }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  bool is_background(std::size_t i) const { return face_id[i] == kBackground; }
};

// Casts one ray through each pixel center. Color is the face color scaled
// by the Lambert term of the viewing ray, floored at 0.1.
inline ViewBuffers render_view(const MeshScene& scene, const CameraPose& pose, int width, int height) {
  if (width < kMinRenderSize || height < kMinRenderSize)
    throw InvalidArgument("render resolution must be at least 16x16");
  const Intrinsics k = pose.intrinsics().scaled_to(width, height);
  const Vec3 origin = pose.center();
  const auto& normals = scene.mesh().face_normals();
  const auto& colors = scene.mesh().face_colors();

  ViewBuffers out;
  out.width = width;
  out.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  out.face_id.assign(n, kBackground);
  out.normal_map.assign(n, Vec3::Zero());
  out.color.assign(n, Color::Ones());
  out.ray_dir.resize(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = out.index(x, y);
      const Vec3 dir = pose.ray_direction(x + 0.5, y + 0.5, k);
      out.ray_dir[i] = dir;
      if (auto hit = scene.cast_ray(origin, dir)) {
        const std::uint32_t f = hit->face;
        out.face_id[i] = static_cast<std::int32_t>(f);
        out.normal_map[i] = normals[f];
        const double lambert = std::clamp(-dir.dot(normals[f]), 0.1, 1.0);
        out.color[i] = colors[f] * lambert;
      }
    }
  }
  return out;
}

inline ViewBuffers render_view(const MeshScene& scene, const CameraPose& pose, int resolution) {
  return render_view(scene, pose, resolution, resolution);
}

inline constexpr std::size_t kMaxRaysPerFace = 64;

// What one view reveals about one face.
struct FaceObservation {
  std::uint32_t face = 0;
  std::size_t pixel_count = 0;
  Vec3 normal = Vec3::Zero();
  std::vector<Vec3> rays;      // at most kMaxRaysPerFace, raster order
  double log_response = 0.0;   // filled by measure_view
};

struct ViewObservation {
  std::size_t pose_index = 0;
  Vec3 view_center = Vec3::Zero();  // filled by measure_view
  std::vector<FaceObservation> faces;  // sorted by face index
  double texture = 0.0;        // filled by measure_view
  bool texture_valid = false;  // false when the texture view was all background

  std::vector<std::uint32_t> visible_faces() const {
    std::vector<std::uint32_t> out;
    out.reserve(faces.size());
    for (const auto& f : faces) out.push_back(f.face);
    return out;
  }

  const FaceObservation* find(std::uint32_t face) const {
    auto it = std::lower_bound(faces.begin(), faces.end(), face,
                               [](const FaceObservation& o, std::uint32_t f) { return o.face < f; });
    return it != faces.end() && it->face == face ? &*it : nullptr;
  }
};

// Picks `cap` of `n` items by uniform stride, preserving order.
inline std::vector<std::size_t> stride_sample(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> picks;
  if (n <= cap) {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
  } else {
    for (std::size_t k = 0; k < cap; ++k) picks.push_back(k * n / cap);
  }
  return picks;
}

// A face is visible when it owns at least one pixel.
inline ViewObservation observe(const ViewBuffers& buffers, std::size_t pose_index) {
  ViewObservation obs;
  obs.pose_index = pose_index;
  std::int32_t max_id = kBackground;
  for (std::int32_t id : buffers.face_id) max_id = std::max(max_id, id);
  if (max_id == kBackground) return obs;

  std::vector<std::vector<std::size_t>> pixels(static_cast<std::size_t>(max_id) + 1);
  for (std::size_t i = 0; i < buffers.pixel_count(); ++i) {
    if (!buffers.is_background(i)) pixels[static_cast<std::size_t>(buffers.face_id[i])].push_back(i);
  }
  for (std::size_t f = 0; f < pixels.size(); ++f) {
    if (pixels[f].empty()) continue;
    FaceObservation fo;
    fo.face = static_cast<std::uint32_t>(f);
    fo.pixel_count = pixels[f].size();
    fo.normal = buffers.normal_map[pixels[f].front()];
    for (std::size_t k : stride_sample(pixels[f].size(), kMaxRaysPerFace))
      fo.rays.push_back(buffers.ray_dir[pixels[f][k]]);
    obs.faces.push_back(std::move(fo));
  }
  return obs;
}

}  // namespace vantage
