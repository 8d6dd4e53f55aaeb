// Copyright 2026 The bayerpipe Authors. All Rights Reserved.
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

#ifndef BAYERPIPE_IMAGE_HPP_
#define BAYERPIPE_IMAGE_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace bayerpipe {

// Single-channel row-major grid of doubles. Used for CFA planes, residual
// channels and as the building block of the three-channel images.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);
  Plane(int width, int height, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(int row, int col) const noexcept {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator()(int row, int col) noexcept {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool is_finite() const noexcept;

  bool operator==(const Plane&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

using GrayImage = Plane;

struct RgbSpace {};
struct OpponentSpace {};

// Planar three-channel image. The tag keeps RGB and YC1C2 data apart at
// compile time; channel order is (R, G, B) or (Y, C1, C2).
template <typename Space>
class Image3 {
 public:
  Image3() = default;
  Image3(int width, int height, double fill = 0.0)
      : planes_{Plane(width, height, fill), Plane(width, height, fill),
                Plane(width, height, fill)} {}
  // Throws DimensionError unless all three planes share one shape.
  Image3(Plane c0, Plane c1, Plane c2);

  int width() const noexcept { return planes_[0].width(); }
  int height() const noexcept { return planes_[0].height(); }
  std::size_t pixel_count() const noexcept { return planes_[0].size(); }

  const Plane& channel(int c) const noexcept { return planes_[c]; }
  Plane& channel(int c) noexcept { return planes_[c]; }

  double operator()(int c, int row, int col) const noexcept {
    return planes_[c](row, col);
  }
  double& operator()(int c, int row, int col) noexcept {
    return planes_[c](row, col);
  }

  bool same_shape(const Image3& other) const noexcept {
    return planes_[0].same_shape(other.planes_[0]);
  }
  bool is_finite() const noexcept {
    return planes_[0].is_finite() && planes_[1].is_finite() &&
           planes_[2].is_finite();
  }

  bool operator==(const Image3&) const = default;

 private:
  std::array<Plane, 3> planes_;
};

using ColorImage = Image3<RgbSpace>;
using OpponentImage = Image3<OpponentSpace>;

extern template class Image3<RgbSpace>;
extern template class Image3<OpponentSpace>;

// Mirror index without repeating the edge sample: -1 -> 1, n -> n - 2.
// Preserves index parity, so Bayer phases survive padding.
inline int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Returns wa * a + wb * b, sample by sample.
Plane blend(const Plane& a, double wa, const Plane& b, double wb);
ColorImage blend(const ColorImage& a, double wa, const ColorImage& b,
                 double wb);

Plane scaled(const Plane& img, double factor);
ColorImage scaled(const ColorImage& img, double factor);

// Throws DimensionError unless the window lies inside the image.
Plane crop(const Plane& img, int row, int col, int width, int height);
ColorImage crop(const ColorImage& img, int row, int col, int width,
                int height);
ColorImage center_crop(const ColorImage& img, int width, int height);

}  // namespace bayerpipe

#endif  // BAYERPIPE_IMAGE_HPP_
