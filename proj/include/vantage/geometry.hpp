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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vantage/error.hpp"
#include "vantage/rng.hpp"

namespace vantage {

using Vec3 = Eigen::Vector3d;
using Color = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;
using Extrinsics = Eigen::Matrix<double, 3, 4>;

inline const Color kDefaultFaceColor{0.5, 0.5, 0.5};

// Indexed triangle mesh with per-face unit normals and per-face RGB colors.
// Immutable once built; `build` validates indices and computes normals.
class TriangleMesh {
 public:
  static TriangleMesh build(std::vector<Vec3> vertices, std::vector<Face> faces,
                            std::vector<Color> face_colors = {}) {
    if (faces.empty()) throw EmptyMesh("mesh has no faces");
    if (face_colors.empty()) face_colors.assign(faces.size(), kDefaultFaceColor);
    if (face_colors.size() != faces.size())
      throw InvalidArgument("face color count does not match face count");
    TriangleMesh mesh;
    mesh.normals_.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (std::uint32_t v : faces[f]) {
        if (v >= vertices.size())
          throw InvalidArgument("face " + std::to_string(f) + " references vertex " +
                                std::to_string(v) + " of " +
                                std::to_string(vertices.size()));
      }
      const Vec3 n = (vertices[faces[f][1]] - vertices[faces[f][0]])
                         .cross(vertices[faces[f][2]] - vertices[faces[f][0]]);
      const double len = n.norm();
      if (!(len > 0.0) || !std::isfinite(len))
        throw DegenerateGeometry("face " + std::to_string(f) + " has zero area");
      mesh.normals_.push_back(n / len);
    }
    mesh.vertices_ = std::move(vertices);
    mesh.faces_ = std::move(faces);
    mesh.colors_ = std::move(face_colors);
    return mesh;
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& face_normals() const { return normals_; }
  const std::vector<Color>& face_colors() const { return colors_; }
  std::size_t face_count() const { return faces_.size(); }

  const Vec3& corner(std::size_t face, int k) const { return vertices_[faces_[face][k]]; }

  // Axis-aligned bounds as (min, max).
  std::pair<Vec3, Vec3> bounds() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& v : vertices_) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    return {lo, hi};
  }

  // Same geometry with faces reordered so that new face i is old face
  // order[i]. Used to check face-numbering invariance.
  TriangleMesh permuted_faces(const std::vector<std::size_t>& order) const {
    std::vector<Face> faces;
    std::vector<Color> colors;
    for (std::size_t i : order) {
      faces.push_back(faces_.at(i));
      colors.push_back(colors_.at(i));
    }
    return build(vertices_, std::move(faces), std::move(colors));
  }

 private:
  TriangleMesh() = default;
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> normals_;
  std::vector<Color> colors_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw MalformedInput("expected a number, got '" + token + "'", line);
  }
}

// Resolves an OBJ vertex reference ("7", "7/2", "7//3", "-1/...").
inline std::uint32_t parse_vertex_ref(const std::string& token, std::size_t vertex_count,
                                      std::size_t line) {
  const std::string head = token.substr(0, token.find('/'));
  long long idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoll(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw MalformedInput("bad face vertex '" + token + "'", line);
  }
  const long long resolved = idx < 0 ? static_cast<long long>(vertex_count) + idx : idx - 1;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long long>(vertex_count))
    throw MalformedInput("face vertex index " + head + " out of range", line);
  return static_cast<std::uint32_t>(resolved);
}

inline std::unordered_map<std::string, Color> read_mtl(const std::filesystem::path& path) {
  std::unordered_map<std::string, Color> materials;
  std::ifstream in(path);
  if (!in) return materials;
  std::string raw, current;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ss(trim(raw));
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    if (key == "newmtl") {
      ss >> current;
    } else if (key == "Kd" && !current.empty()) {
      std::string r, g, b;
      if (!(ss >> r >> g >> b)) throw MalformedInput(path.string() + ": Kd needs 3 values", line);
      materials[current] = Color(parse_double(r, line), parse_double(g, line), parse_double(b, line));
    }
  }
  return materials;
}

}  // namespace detail

// Reads Wavefront OBJ triangle geometry. Polygons are fan-triangulated.
// Face colors come from vertex colors ("v x y z r g b") when every corner
// has one, else from the active material's Kd, else mid-gray.
inline TriangleMesh load_mesh_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<Vec3> vertices;
  std::vector<std::optional<Color>> vertex_colors;
  std::vector<Face> faces;
  std::vector<Color> colors;
  std::unordered_map<std::string, Color> materials;
  std::optional<Color> material;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ss(detail::trim(raw));
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    std::vector<std::string> args;
    for (std::string t; ss >> t;) args.push_back(t);

    if (key == "v") {
      if (args.size() < 3) throw MalformedInput("vertex needs 3 coordinates", line);
      vertices.emplace_back(detail::parse_double(args[0], line), detail::parse_double(args[1], line),
                            detail::parse_double(args[2], line));
      if (args.size() >= 6) {
        vertex_colors.emplace_back(Color(detail::parse_double(args[3], line),
                                         detail::parse_double(args[4], line),
                                         detail::parse_double(args[5], line)));
      } else {
        vertex_colors.emplace_back(std::nullopt);
      }
    } else if (key == "f") {
      if (args.size() < 3) throw MalformedInput("face needs at least 3 vertices", line);
      std::vector<std::uint32_t> ids;
      for (const auto& a : args) ids.push_back(detail::parse_vertex_ref(a, vertices.size(), line));
      for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
        const Face face{ids[0], ids[k], ids[k + 1]};
        Color c = material.value_or(kDefaultFaceColor);
        if (vertex_colors[face[0]] && vertex_colors[face[1]] && vertex_colors[face[2]])
          c = (*vertex_colors[face[0]] + *vertex_colors[face[1]] + *vertex_colors[face[2]]) / 3.0;
        const Vec3 n = (vertices[face[1]] - vertices[face[0]]).cross(vertices[face[2]] - vertices[face[0]]);
        if (!(n.norm() > 0.0)) throw DegenerateGeometry("zero-area face at line " + std::to_string(line));
        faces.push_back(face);
        colors.push_back(c.cwiseMax(0.0).cwiseMin(1.0));
      }
    } else if (key == "mtllib" && !args.empty()) {
      for (const auto& [name, kd] : detail::read_mtl(path.parent_path() / args[0]))
        materials[name] = kd;
    } else if (key == "usemtl") {
      material.reset();
      if (!args.empty()) {
        if (auto it = materials.find(args[0]); it != materials.end()) material = it->second;
      }
    }
  }
  if (faces.empty()) throw EmptyMesh(path.string() + " contains no faces");
  return TriangleMesh::build(std::move(vertices), std::move(faces), std::move(colors));
}

// Writes the mesh as OBJ with per-vertex colors. Vertices are duplicated per
// face so that each face keeps its own color on re-import.
inline void write_mesh_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Color& c = mesh.face_colors()[f];
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh.corner(f, k);
      out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << ' ' << c.x() << ' ' << c.y() << ' '
          << c.z() << '\n';
    }
  }
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    out << "f " << 3 * f + 1 << ' ' << 3 * f + 2 << ' ' << 3 * f + 3 << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

// Centers the bounding box on the origin and scales uniformly so the largest
// half-extent is 1.
inline TriangleMesh normalize_scale(const TriangleMesh& mesh) {
  const auto [lo, hi] = mesh.bounds();
  const Vec3 center = (lo + hi) / 2.0;
  const double half = ((hi - lo) / 2.0).maxCoeff();
  if (!(half > 0.0)) throw DegenerateGeometry("mesh has zero extent on every axis");
  if (center.isZero(0.0) && half == 1.0) return mesh;
  std::vector<Vec3> vertices = mesh.vertices();
  for (auto& v : vertices) v = (v - center) / half;
  return TriangleMesh::build(std::move(vertices), mesh.faces(), mesh.face_colors());
}

// Pinhole intrinsics in pixels. Image x points right, y points down.
struct Intrinsics {
  double focal = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  static Intrinsics from_fov(double fov_y_deg, int width, int height) {
    if (width <= 0 || height <= 0) throw InvalidArgument("image size must be positive");
    if (!(fov_y_deg > 0.0 && fov_y_deg < 180.0)) throw InvalidArgument("fov_y_deg must be in (0, 180)");
    const double f = 0.5 * height / std::tan(0.5 * fov_y_deg * std::numbers::pi / 180.0);
    return {f, 0.5 * width, 0.5 * height, width, height};
  }

  double fov_y_deg() const { return 2.0 * std::atan(0.5 * height / focal) * 180.0 / std::numbers::pi; }
  double fov_x_rad() const { return 2.0 * std::atan(0.5 * width / focal); }

  // Same field of view at another resolution.
  Intrinsics scaled_to(int w, int h) const {
    const double sx = static_cast<double>(w) / width;
    const double sy = static_cast<double>(h) / height;
    return {focal * sy, cx * sx, cy * sy, w, h};
  }
};

// Camera-to-world pose. Extrinsic columns are the camera's right, up and
// backward axes in world coordinates followed by the camera center; the
// camera looks along -backward.
class CameraPose {
 public:
  CameraPose() = default;
  CameraPose(const Extrinsics& extrinsics, const Intrinsics& intrinsics)
      : extrinsics_(extrinsics), intrinsics_(intrinsics) {}

  static CameraPose look_at(const Vec3& center, const Vec3& target, const Intrinsics& intrinsics) {
    const Vec3 forward = (target - center).normalized();
    Vec3 right = forward.cross(Vec3::UnitZ());
    if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitX());
    right.normalize();
    const Vec3 up = right.cross(forward);
    Extrinsics e;
    e.col(0) = right;
    e.col(1) = up;
    e.col(2) = -forward;
    e.col(3) = center;
    return {e, intrinsics};
  }

  const Extrinsics& extrinsics() const { return extrinsics_; }
  const Intrinsics& intrinsics() const { return intrinsics_; }
  Eigen::Matrix3d rotation() const { return extrinsics_.leftCols<3>(); }
  Vec3 center() const { return extrinsics_.col(3); }
  Vec3 right() const { return extrinsics_.col(0); }
  Vec3 up() const { return extrinsics_.col(1); }
  Vec3 forward() const { return -extrinsics_.col(2); }

  // World-space unit ray direction through image position (u, v) for the
  // given intrinsics; pixel centers sit at half-integer coordinates.
  Vec3 ray_direction(double u, double v, const Intrinsics& k) const {
    const Vec3 cam((u - k.cx) / k.focal, -(v - k.cy) / k.focal, -1.0);
    return (rotation() * cam).normalized();
  }

  Eigen::Matrix4d to_matrix4() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topRows<3>() = extrinsics_;
    return m;
  }

 private:
  Extrinsics extrinsics_ = Extrinsics::Zero();
  Intrinsics intrinsics_;
};

struct PoseSet {
  std::vector<CameraPose> poses;
  double radius = 0.0;
  std::int64_t seed = 0;

  std::size_t size() const { return poses.size(); }
  const CameraPose& operator[](std::size_t i) const { return poses[i]; }
};

// Angle in degrees between two camera centers as seen from the origin.
inline double angular_distance_deg(const Vec3& a, const Vec3& b) {
  const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

enum class SphereMode { kRandom, kRing };

struct SphereOptions {
  double elevation_deg = 30.0;  // ring mode only
  double fov_y_deg = 50.0;
  int width = 128;
  int height = 128;
};

inline constexpr double kDefaultSphereRadius = 3.0;

// Inward-looking poses on a sphere centered at the origin. Random mode
// samples uniformly on the sphere; ring mode spaces azimuths evenly at a
// fixed elevation.
inline PoseSet generate_sphere_poses(double radius, std::size_t count, SphereMode mode,
                                     std::int64_t seed, const SphereOptions& options = {}) {
  if (count == 0) throw InvalidArgument("pose count must be positive");
  if (!(radius > 0.0)) throw InvalidArgument("sphere radius must be positive");
  const Intrinsics k = Intrinsics::from_fov(options.fov_y_deg, options.width, options.height);
  PoseSet set;
  set.radius = radius;
  set.seed = seed;
  set.poses.reserve(count);
  Rng rng(static_cast<std::uint64_t>(seed));
  const double el = options.elevation_deg * std::numbers::pi / 180.0;
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 dir;
    if (mode == SphereMode::kRandom) {
      const double z = 1.0 - 2.0 * rng.uniform();
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      dir = Vec3(s * std::cos(phi), s * std::sin(phi), z);
    } else {
      const double az = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      dir = Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    }
    set.poses.push_back(CameraPose::look_at(radius * dir.normalized(), Vec3::Zero(), k));
  }
  return set;
}

}  // namespace vantage
