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

#include "bayerpipe/image.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bayerpipe/error.hpp"

namespace bayerpipe {

Plane::Plane(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw DimensionError("negative image size " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Plane::Plane(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 0 || height < 0 ||
      values_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("plane buffer of " + std::to_string(values_.size()) +
                         " samples does not match " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
}

bool Plane::is_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <typename Space>
Image3<Space>::Image3(Plane c0, Plane c1, Plane c2)
    : planes_{std::move(c0), std::move(c1), std::move(c2)} {
  if (!planes_[0].same_shape(planes_[1]) ||
      !planes_[0].same_shape(planes_[2])) {
    throw DimensionError("channel planes differ in size");
  }
}

template class Image3<RgbSpace>;
template class Image3<OpponentSpace>;

Plane blend(const Plane& a, double wa, const Plane& b, double wb) {
  if (!a.same_shape(b)) throw DimensionError("blend: size mismatch");
  Plane out(a.width(), a.height());
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] = wa * av[k] + wb * bv[k];
  return out;
}

ColorImage blend(const ColorImage& a, double wa, const ColorImage& b,
                 double wb) {
  if (!a.same_shape(b)) throw DimensionError("blend: size mismatch");
  return ColorImage(blend(a.channel(0), wa, b.channel(0), wb),
                    blend(a.channel(1), wa, b.channel(1), wb),
                    blend(a.channel(2), wa, b.channel(2), wb));
}

Plane scaled(const Plane& img, double factor) {
  Plane out = img;
  for (double& v : out.values()) v *= factor;
  return out;
}

ColorImage scaled(const ColorImage& img, double factor) {
  return ColorImage(scaled(img.channel(0), factor),
                    scaled(img.channel(1), factor),
                    scaled(img.channel(2), factor));
}

Plane crop(const Plane& img, int row, int col, int width, int height) {
  if (row < 0 || col < 0 || width < 0 || height < 0 ||
      row + height > img.height() || col + width > img.width()) {
    throw DimensionError("crop window " + std::to_string(width) + "x" +
                         std::to_string(height) + " at (" +
                         std::to_string(row) + ", " + std::to_string(col) +
                         ") exceeds " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()));
  }
  Plane out(width, height);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j) out(i, j) = img(row + i, col + j);
  return out;
}

ColorImage crop(const ColorImage& img, int row, int col, int width,
                int height) {
  return ColorImage(crop(img.channel(0), row, col, width, height),
                    crop(img.channel(1), row, col, width, height),
                    crop(img.channel(2), row, col, width, height));
}

ColorImage center_crop(const ColorImage& img, int width, int height) {
  return crop(img, (img.height() - height) / 2, (img.width() - width) / 2,
              width, height);
}

}  // namespace bayerpipe
