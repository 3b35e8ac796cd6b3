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

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

#include "vantage/error.hpp"
#include "vantage/visibility.hpp"

namespace vantage {

// Writes 8-bit RGB rows, top row first.
inline void write_png(const std::filesystem::path& path, int width, int height,
                      const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
    throw InvalidArgument("pixel buffer size does not match image size");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline void write_color_png(const std::filesystem::path& path, const ViewBuffers& b) {
  std::vector<std::uint8_t> rgb;
  rgb.reserve(b.pixel_count() * 3);
  for (const auto& c : b.color)
    for (int k = 0; k < 3; ++k) rgb.push_back(to_byte(c[k]));
  write_png(path, b.width, b.height, rgb);
}

// Normals remapped from [-1, 1] to [0, 255]; background stays black.
inline void write_normal_png(const std::filesystem::path& path, const ViewBuffers& b) {
  std::vector<std::uint8_t> rgb;
  rgb.reserve(b.pixel_count() * 3);
  for (std::size_t i = 0; i < b.pixel_count(); ++i)
    for (int k = 0; k < 3; ++k) rgb.push_back(b.is_background(i) ? 0 : to_byte(0.5 * (b.normal_map[i][k] + 1.0)));
  write_png(path, b.width, b.height, rgb);
}

// Each face id hashed to a stable color; background is black.
inline void write_face_id_png(const std::filesystem::path& path, const ViewBuffers& b) {
  std::vector<std::uint8_t> rgb;
  rgb.reserve(b.pixel_count() * 3);
  for (std::int32_t id : b.face_id) {
    std::uint32_t h = id == kBackground ? 0u : static_cast<std::uint32_t>(id) * 2654435761u + 0x9e3779b9u;
    h ^= h >> 15;
    rgb.push_back(id == kBackground ? 0 : static_cast<std::uint8_t>(h));
    rgb.push_back(id == kBackground ? 0 : static_cast<std::uint8_t>(h >> 8));
    rgb.push_back(id == kBackground ? 0 : static_cast<std::uint8_t>(h >> 16));
  }
  write_png(path, b.width, b.height, rgb);
}

// Writes <stem>_color.png, <stem>_normal.png and <stem>_faces.png.
inline void dump_view_buffers(const std::filesystem::path& dir, const std::string& stem, const ViewBuffers& b) {
  write_color_png(dir / (stem + "_color.png"), b);
  write_normal_png(dir / (stem + "_normal.png"), b);
  write_face_id_png(dir / (stem + "_faces.png"), b);
}

}  // namespace vantage
