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

#include "bayerpipe/color.hpp"

#include <cmath>

namespace bayerpipe {
namespace {

template <typename Out, typename In>
Out apply(const In& img, const Matrix3& m) {
  Out out(img.width(), img.height());
  auto c0 = img.channel(0).values();
  auto c1 = img.channel(1).values();
  auto c2 = img.channel(2).values();
  auto o0 = out.channel(0).values();
  auto o1 = out.channel(1).values();
  auto o2 = out.channel(2).values();
  for (std::size_t k = 0; k < c0.size(); ++k) {
    const double a = c0[k], b = c1[k], c = c2[k];
    o0[k] = m[0][0] * a + m[0][1] * b + m[0][2] * c;
    o1[k] = m[1][0] * a + m[1][1] * b + m[1][2] * c;
    o2[k] = m[2][0] * a + m[2][1] * b + m[2][2] * c;
  }
  return out;
}

Matrix3 transpose(const Matrix3& m) {
  Matrix3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
  return t;
}

}  // namespace

const Matrix3& opponent_matrix() noexcept {
  static const Matrix3 m = [] {
    const double s3 = 1.0 / std::sqrt(3.0);
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s6 = 1.0 / std::sqrt(6.0);
    return Matrix3{{{s3, s3, s3}, {s2, 0.0, -s2}, {s6, -2.0 * s6, s6}}};
  }();
  return m;
}

OpponentImage rgb_to_opponent(const ColorImage& img) {
  return apply<OpponentImage>(img, opponent_matrix());
}

ColorImage opponent_to_rgb(const OpponentImage& img) {
  static const Matrix3 inverse = transpose(opponent_matrix());
  return apply<ColorImage>(img, inverse);
}

}  // namespace bayerpipe
