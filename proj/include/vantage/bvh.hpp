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
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "vantage/geometry.hpp"

namespace vantage {

struct RayHit {
  std::uint32_t face = 0;
  double distance = 0.0;
};

// Hits closer than this along the ray are ignored.
inline constexpr double kMinHitDistance = 1e-9;

// Nearest-hit ordering shared by every traversal: smaller distance first,
// then lower face index.
inline bool closer(const RayHit& a, const RayHit& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.face < b.face);
}

// Watertight ray/triangle test (shear-and-scale to ray space, then 2D edge
// functions). Both windings are hittable. Returns the hit distance along a
// unit `dir`.
inline std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& p0,
                                                const Vec3& p1, const Vec3& p2) {
  int kz = 0;
  dir.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0) std::swap(kx, ky);
  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 a = p0 - origin;
  const Vec3 b = p1 - origin;
  const Vec3 c = p2 - origin;
  const double ax = a[kx] - sx * a[kz];
  const double ay = a[ky] - sy * a[kz];
  const double bx = b[kx] - sx * b[kz];
  const double by = b[ky] - sy * b[kz];
  const double cx = c[kx] - sx * c[kz];
  const double cy = c[ky] - sy * c[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double t_scaled = u * (sz * a[kz]) + v * (sz * b[kz]) + w * (sz * c[kz]);
  const double t = t_scaled / det;
  if (!(t > kMinHitDistance) || !std::isfinite(t)) return std::nullopt;
  return t;
}

// Reference nearest hit: tests every triangle.
inline std::optional<RayHit> cast_ray_brute_force(const TriangleMesh& mesh, const Vec3& origin,
                                                  const Vec3& dir) {
  std::optional<RayHit> best;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    if (auto t = intersect_triangle(origin, dir, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2))) {
      const RayHit hit{static_cast<std::uint32_t>(f), *t};
      if (!best || closer(hit, *best)) best = hit;
    }
  }
  return best;
}

// Binary bounding-volume hierarchy over a mesh's triangles, built by
// median split along the widest centroid axis. Stores face indices only;
// queries take the mesh it was built from.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh, std::size_t leaf_size = 4) : mesh_(&mesh) {
    order_.resize(mesh.face_count());
    std::iota(order_.begin(), order_.end(), 0u);
    centroids_.reserve(mesh.face_count());
    for (std::size_t f = 0; f < mesh.face_count(); ++f)
      centroids_.push_back((mesh.corner(f, 0) + mesh.corner(f, 1) + mesh.corner(f, 2)) / 3.0);
    nodes_.reserve(2 * mesh.face_count());
    nodes_.emplace_back();
    build(0, 0, order_.size(), std::max<std::size_t>(1, leaf_size));
    centroids_.clear();
    centroids_.shrink_to_fit();
    mesh_ = nullptr;
  }

  // `mesh` must be the mesh the hierarchy was built from.
  std::optional<RayHit> cast(const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir) const {
    const Vec3 inv = dir.cwiseInverse();
    std::optional<RayHit> best;
    std::array<std::uint32_t, 64> stack;
    std::size_t top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      const double limit = best ? best->distance : std::numeric_limits<double>::infinity();
      if (!overlaps(node, origin, inv, limit)) continue;
      if (node.count > 0) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          const std::uint32_t f = order_[i];
          if (auto t = intersect_triangle(origin, dir, mesh.corner(f, 0), mesh.corner(f, 1),
                                          mesh.corner(f, 2))) {
            const RayHit hit{f, *t};
            if (!best || closer(hit, *best)) best = hit;
          }
        }
      } else {
        // Visit the child on the ray's near side first.
        const std::uint32_t left = node.first;
        const std::uint32_t right = node.first + 1;
        if (dir[node.axis] < 0.0) {
          stack[top++] = left;
          stack[top++] = right;
        } else {
          stack[top++] = right;
          stack[top++] = left;
        }
      }
    }
    return best;
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Vec3 lo;
    Vec3 hi;
    std::uint32_t first = 0;  // leaf: first index into order_; inner: left child
    std::uint32_t count = 0;  // 0 marks an inner node
    int axis = 0;
  };

  // Slab test, widened so rounding can never reject a box that the exact
  // ray touches. Boxes entered exactly at `limit` are still visited so
  // equal-distance ties resolve the same way as the brute-force loop.
  static bool overlaps(const Node& n, const Vec3& o, const Vec3& inv, double limit) {
    constexpr double widen = 1.0 + 1e-12;
    double t0 = 0.0;
    double t1 = limit;
    for (int a = 0; a < 3; ++a) {
      double tn = (n.lo[a] - o[a]) * inv[a];
      double tf = (n.hi[a] - o[a]) * inv[a];
      if (tn > tf) std::swap(tn, tf);
      tf *= widen;
      tn = tn > 0 ? tn / widen : tn * widen;
      if (tn > t0) t0 = tn;
      if (tf < t1) t1 = tf;
      if (t0 > t1) return false;
    }
    return true;
  }

  // Fills the already-allocated node `index` with the faces in
  // order_[begin, end). Children of an inner node occupy adjacent slots.
  void build(std::uint32_t index, std::size_t begin, std::size_t end, std::size_t leaf_size) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    Vec3 clo = lo;
    Vec3 chi = hi;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t f = order_[i];
      for (int k = 0; k < 3; ++k) {
        lo = lo.cwiseMin(mesh_->corner(f, k));
        hi = hi.cwiseMax(mesh_->corner(f, k));
      }
      clo = clo.cwiseMin(centroids_[f]);
      chi = chi.cwiseMax(centroids_[f]);
    }
    const Vec3 pad = (hi - lo).cwiseAbs() * 1e-9 + Vec3::Constant(1e-12);
    nodes_[index].lo = lo - pad;
    nodes_[index].hi = hi + pad;

    int axis = 0;
    (chi - clo).maxCoeff(&axis);
    if (end - begin <= leaf_size || chi[axis] == clo[axis]) {
      nodes_[index].first = static_cast<std::uint32_t>(begin);
      nodes_[index].count = static_cast<std::uint32_t>(end - begin);
      return;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return centroids_[a][axis] < centroids_[b][axis] ||
                              (centroids_[a][axis] == centroids_[b][axis] && a < b);
                     });
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[index].first = left;
    nodes_[index].count = 0;
    nodes_[index].axis = axis;
    build(left, begin, mid, leaf_size);
    build(left + 1, mid, end, leaf_size);
  }

  const TriangleMesh* mesh_;  // valid during construction only
  std::vector<std::uint32_t> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

}  // namespace vantage
