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

#include <array>
#include <functional>
#include <numeric>

#include "test_support.hpp"

namespace vantage {
namespace {

// Full-frame synthetic buffer with one face id per pixel and the given colors.
ViewBuffers synthetic(int w, int h, const std::function<Color(int, int)>& color) {
  ViewBuffers b;
  b.width = w;
  b.height = h;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  b.face_id.assign(n, 0);
  b.normal_map.assign(n, Vec3(0, 0, 1));
  b.ray_dir.assign(n, Vec3(0, 0, -1));
  b.color.resize(n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) b.color[b.index(x, y)] = color(x, y);
  return b;
}

TEST(LogKernel, SumsToZeroAndHasDeclaredSide) {
  for (double sigma : {0.5, 1.0, 1.5, 2.0, 3.7}) {
    const LogKernel k = LogKernel::make(sigma);
    EXPECT_EQ(k.side(), 2 * static_cast<int>(std::ceil(2.5 * sigma)) + 1);
    EXPECT_NEAR(std::accumulate(k.weights.begin(), k.weights.end(), 0.0), 0.0, 1e-9);
    EXPECT_LT(k.at(0, 0), 0.0);
    EXPECT_EQ(k.at(1, 2), k.at(-2, 1));
  }
  EXPECT_THROW(LogKernel::make(0.0), InvalidArgument);
}

TEST(LogMagnitude, ConstantNormalsGiveZero) {
  const ViewBuffers b = synthetic(20, 20, [](int, int) { return Color(0.5, 0.5, 0.5); });
  for (double m : log_magnitude(b, LogKernel::make(1.5))) EXPECT_NEAR(m, 0.0, 1e-12);
}

TEST(LogMagnitude, CreaseRespondsOnBothSides) {
  ViewBuffers b = synthetic(32, 32, [](int, int) { return Color(0.5, 0.5, 0.5); });
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) {
      b.face_id[b.index(x, y)] = 1;
      b.normal_map[b.index(x, y)] = Vec3(1, 0, 0);
    }
  const auto m = log_magnitude(b, LogKernel::make(1.5));
  EXPECT_GT(m[b.index(15, 10)], 0.01);
  EXPECT_GT(m[b.index(16, 10)], 0.01);
  EXPECT_NEAR(m[b.index(2, 10)], 0.0, 1e-12);
  const auto per_face = face_log_response(b, 1.5);
  ASSERT_EQ(per_face.size(), 2u);
  EXPECT_NEAR(per_face[0], per_face[1], 1e-12);
  EXPECT_GT(per_face[0], 0.0);
}

TEST(RgbToHsv, PrimaryAndAchromaticColors) {
  const Hsv red = rgb_to_hsv(Color(1, 0, 0));
  EXPECT_DOUBLE_EQ(red.h, 0.0);
  EXPECT_DOUBLE_EQ(red.s, 1.0);
  EXPECT_DOUBLE_EQ(red.v, 1.0);
  EXPECT_NEAR(rgb_to_hsv(Color(0, 1, 0)).h, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(rgb_to_hsv(Color(0, 0, 1)).h, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(rgb_to_hsv(Color(1, 0, 1)).h, 5.0 / 6.0, 1e-15);
  const Hsv gray = rgb_to_hsv(Color(0.4, 0.4, 0.4));
  EXPECT_EQ(gray.h, 0.0);
  EXPECT_EQ(gray.s, 0.0);
  EXPECT_DOUBLE_EQ(gray.v, 0.4);
  EXPECT_EQ(rgb_to_hsv(Color(0, 0, 0)).s, 0.0);
  const Hsv mix = rgb_to_hsv(Color(0.8, 0.4, 0.2));
  EXPECT_NEAR(mix.h, 1.0 / 18.0, 1e-15);
  EXPECT_NEAR(mix.s, 0.75, 1e-15);
}

TEST(LbpHistogram, HasTwoToThePBins) {
  const std::vector<double> flat(100, 0.3);
  const std::vector<bool> fg(100, true);
  const auto hist = lbp_histogram(flat, fg, 10, 10, 3.0, 3);
  ASSERT_EQ(hist.size(), 8u);
  EXPECT_EQ(hist[7], 1.0);
  EXPECT_EQ(lbp_histogram(flat, std::vector<bool>(100, false), 10, 10, 3.0, 3).size(), 0u);
}

TEST(LbpHistogram, RejectsBadParameters) {
  const std::vector<double> flat(100, 0.3);
  const std::vector<bool> fg(100, true);
  EXPECT_THROW(lbp_histogram(flat, fg, 10, 10, 3.0, 1), InvalidArgument);
  EXPECT_THROW(lbp_histogram(flat, fg, 10, 10, 0.5, 3), InvalidArgument);
}

TEST(LbpHistogram, SingleBrightPixelBreaksItsNeighborsCodes) {
  std::vector<double> v(15 * 15, 0.0);
  const std::vector<bool> fg(v.size(), true);
  v[7 * 15 + 7] = 1.0;
  const auto hist = lbp_histogram(v, fg, 15, 15, 1.0, 4);
  // Only the bright center sees darker neighbors everywhere.
  EXPECT_NEAR(hist[0], 1.0 / 225.0, 1e-15);
  EXPECT_NEAR(hist[15], 224.0 / 225.0, 1e-15);
}

TEST(TextureScore, ConstantImageScoresZero) {
  const ViewBuffers b = synthetic(40, 40, [](int, int) { return Color(0.7, 0.3, 0.2); });
  const TextureMeasure m = texture_score(b, 3.0, 3);
  EXPECT_TRUE(m.valid);
  EXPECT_EQ(m.score, 0.0);
}

TEST(TextureScore, ShadingOnlyImageScoresZero) {
  // Hue and saturation do not change with a gray-level shading ramp.
  const ViewBuffers b = synthetic(40, 40, [](int x, int) { return Color(0.6, 0.3, 0.15) * (0.2 + 0.02 * x); });
  EXPECT_NEAR(texture_score(b, 3.0, 3).score, 0.0, 1e-12);
}

TEST(TextureScore, AllBackgroundIsInvalid) {
  ViewBuffers b = synthetic(20, 20, [](int, int) { return Color::Ones(); });
  std::fill(b.face_id.begin(), b.face_id.end(), kBackground);
  const TextureMeasure m = texture_score(b, 3.0, 3);
  EXPECT_FALSE(m.valid);
  EXPECT_EQ(m.score, 0.0);
}

const std::array<Color, 4> kPalette = {Color(0.9, 0.2, 0.2), Color(0.2, 0.8, 0.3), Color(0.2, 0.35, 0.9),
                                       Color(0.9, 0.8, 0.1)};

// Cells a little wider than the LBP radius; much wider cells are mostly flat
// interior and drift back toward zero.
TEST(TextureScore, MultiColorCheckerExceedsHalf) {
  for (int pitch : {3, 4, 5}) {
    const ViewBuffers b = synthetic(96, 96, [pitch](int x, int y) {
      return kPalette[static_cast<std::size_t>((x / pitch) % 2 + 2 * ((y / pitch) % 2))];
    });
    EXPECT_GT(texture_score(b, 3.0, 3).score, 0.5) << "pitch " << pitch;
  }
}

TEST(TextureScore, TwoToneCheckerIsCappedAtHalf) {
  // Pixels on the lower side of a two-level channel always produce the
  // all-ones code, so at most half the pixels can count as texture.
  for (int pitch : {1, 3, 4}) {
    const ViewBuffers b = synthetic(96, 96, [pitch](int x, int y) {
      return ((x / pitch) + (y / pitch)) % 2 == 0 ? kPalette[0] : kPalette[2];
    });
    const double s = texture_score(b, 3.0, 3).score;
    EXPECT_LE(s, 0.5) << "pitch " << pitch;
    EXPECT_GT(s, 0.0) << "pitch " << pitch;
  }
}

}  // namespace
}  // namespace vantage
