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
#include <numbers>
#include <vector>

#include "vantage/error.hpp"
#include "vantage/visibility.hpp"

namespace vantage {

// Square Laplacian-of-Gaussian kernel of side 2*ceil(2.5*sigma)+1, shifted
// so its entries sum to zero.
struct LogKernel {
  int radius = 0;
  std::vector<double> weights;  // (2*radius+1)^2, row-major

  int side() const { return 2 * radius + 1; }
  double at(int dx, int dy) const { return weights[(dy + radius) * side() + (dx + radius)]; }

  static LogKernel make(double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma_Q must be positive");
    LogKernel k;
    k.radius = static_cast<int>(std::ceil(2.5 * sigma));
    const int side = k.side();
    k.weights.resize(static_cast<std::size_t>(side) * side);
    const double s2 = sigma * sigma;
    double sum = 0.0;
    for (int dy = -k.radius; dy <= k.radius; ++dy) {
      for (int dx = -k.radius; dx <= k.radius; ++dx) {
        const double r2 = dx * dx + dy * dy;
        const double v = -1.0 / (std::numbers::pi * s2 * s2) * (1.0 - r2 / (2.0 * s2)) *
                         std::exp(-r2 / (2.0 * s2));
        k.weights[(dy + k.radius) * side + (dx + k.radius)] = v;
        sum += v;
      }
    }
    const double mean = sum / static_cast<double>(k.weights.size());
    for (double& w : k.weights) w -= mean;
    return k;
  }
};

// Per-pixel sum over the three normal channels of |LoG * normal|.
// Background normals are zero; the image border is clamped.
inline std::vector<double> log_magnitude(const ViewBuffers& buffers, const LogKernel& kernel) {
  const int w = buffers.width;
  const int h = buffers.height;
  std::vector<double> out(buffers.pixel_count(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (buffers.is_background(buffers.index(x, y))) continue;
      Vec3 acc = Vec3::Zero();
      for (int dy = -kernel.radius; dy <= kernel.radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -kernel.radius; dx <= kernel.radius; ++dx) {
          const int xx = std::clamp(x + dx, 0, w - 1);
          acc += kernel.at(dx, dy) * buffers.normal_map[buffers.index(xx, yy)];
        }
      }
      out[buffers.index(x, y)] = acc.cwiseAbs().sum();
    }
  }
  return out;
}

// Mean LoG magnitude over each face's pixels, indexed by face id; faces
// without pixels get 0.
inline std::vector<double> face_log_response(const ViewBuffers& buffers, double sigma) {
  const auto magnitude = log_magnitude(buffers, LogKernel::make(sigma));
  std::int32_t max_id = kBackground;
  for (std::int32_t id : buffers.face_id) max_id = std::max(max_id, id);
  std::vector<double> sum(static_cast<std::size_t>(max_id + 1), 0.0);
  std::vector<std::size_t> count(sum.size(), 0);
  for (std::size_t i = 0; i < buffers.pixel_count(); ++i) {
    if (buffers.is_background(i)) continue;
    sum[buffers.face_id[i]] += magnitude[i];
    ++count[buffers.face_id[i]];
  }
  for (std::size_t f = 0; f < sum.size(); ++f)
    if (count[f] > 0) sum[f] /= static_cast<double>(count[f]);
  return sum;
}

struct Hsv {
  double h = 0.0;  // [0, 1)
  double s = 0.0;
  double v = 0.0;
};

// Hexcone model; hue of an achromatic color is 0.
inline Hsv rgb_to_hsv(const Color& rgb) {
  const double mx = rgb.maxCoeff();
  const double mn = rgb.minCoeff();
  const double chroma = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? chroma / mx : 0.0;
  if (chroma > 0.0) {
    double h;
    if (mx == rgb.x()) {
      h = std::fmod((rgb.y() - rgb.z()) / chroma, 6.0);
    } else if (mx == rgb.y()) {
      h = (rgb.z() - rgb.x()) / chroma + 2.0;
    } else {
      h = (rgb.x() - rgb.y()) / chroma + 4.0;
    }
    h /= 6.0;
    if (h < 0.0) h += 1.0;
    if (h >= 1.0) h -= 1.0;
    out.h = h;
  }
  return out;
}

// Neighbor comparisons treat values within this of the center as equal, so
// interpolation round-off on flat regions does not register as texture.
inline constexpr double kLbpTolerance = 1e-9;

// Normalized histogram of plain local binary pattern codes over the
// non-background pixels of `channel`. Neighbor p sits at angle 2*pi*p/points
// on a circle of `radius` pixels and is bilinearly interpolated; bit p is
// set when the neighbor is >= the center. A neighbor that falls outside the
// image or draws on a background pixel counts as set. Returns an empty
// vector when every pixel is background.
inline std::vector<double> lbp_histogram(const std::vector<double>& channel,
                                         const std::vector<bool>& foreground, int width,
                                         int height, double radius, int points) {
  if (points < 2 || points > 24) throw InvalidArgument("p_T must be in [2, 24]");
  if (!(radius >= 1.0)) throw InvalidArgument("r_T must be at least 1");
  std::vector<std::array<double, 2>> offsets(points);
  for (int p = 0; p < points; ++p) {
    const double a = 2.0 * std::numbers::pi * p / points;
    // Snap away trig round-off so exact grid offsets stay exact.
    offsets[p] = {std::round(radius * std::cos(a) * 1e9) / 1e9,
                  std::round(-radius * std::sin(a) * 1e9) / 1e9};
  }
  std::vector<double> hist(std::size_t{1} << points, 0.0);
  std::size_t total = 0;
  auto at = [&](int x, int y) { return static_cast<std::size_t>(y) * width + x; };

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!foreground[at(x, y)]) continue;
      const double center = channel[at(x, y)];
      unsigned code = 0;
      for (int p = 0; p < points; ++p) {
        const double sx = x + offsets[p][0];
        const double sy = y + offsets[p][1];
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0;
        const double fy = sy - y0;
        bool set = false;
        double value = 0.0;
        for (int j = 0; j < 2 && !set; ++j) {
          for (int i = 0; i < 2 && !set; ++i) {
            const double wgt = (i ? fx : 1.0 - fx) * (j ? fy : 1.0 - fy);
            if (wgt == 0.0) continue;
            const int xx = x0 + i;
            const int yy = y0 + j;
            if (xx < 0 || yy < 0 || xx >= width || yy >= height || !foreground[at(xx, yy)]) {
              set = true;
            } else {
              value += wgt * channel[at(xx, yy)];
            }
          }
        }
        if (set || value >= center - kLbpTolerance) code |= 1u << p;
      }
      hist[code] += 1.0;
      ++total;
    }
  }
  if (total == 0) return {};
  for (double& h : hist) h /= static_cast<double>(total);
  return hist;
}

struct TextureMeasure {
  double score = 0.0;
  bool valid = false;  // false when no foreground pixel exists
};

// 1 - (share of all-ones LBP codes), averaged over the hue and saturation
// channels of the color buffer.
inline TextureMeasure texture_score(const ViewBuffers& buffers, double radius, int points) {
  const std::size_t n = buffers.pixel_count();
  std::vector<double> hue(n), sat(n);
  std::vector<bool> fg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Hsv hsv = rgb_to_hsv(buffers.color[i]);
    hue[i] = hsv.h;
    sat[i] = hsv.s;
    fg[i] = !buffers.is_background(i);
  }
  const std::size_t flat_bin = (std::size_t{1} << points) - 1;
  const auto h_hist = lbp_histogram(hue, fg, buffers.width, buffers.height, radius, points);
  if (h_hist.empty()) return {};
  const auto s_hist = lbp_histogram(sat, fg, buffers.width, buffers.height, radius, points);
  return {0.5 * ((1.0 - h_hist[flat_bin]) + (1.0 - s_hist[flat_bin])), true};
}

}  // namespace vantage
