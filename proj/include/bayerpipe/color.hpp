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

#ifndef BAYERPIPE_COLOR_HPP_
#define BAYERPIPE_COLOR_HPP_

#include <array>

#include "bayerpipe/image.hpp"

namespace bayerpipe {

// Orthonormal luminance/chrominance basis. Rows are Y, C1, C2:
//   Y  = (R + G + B) / sqrt(3)
//   C1 = (R - B) / sqrt(2)
//   C2 = (R - 2G + B) / sqrt(6)
// The inverse is the transpose.
using Matrix3 = std::array<std::array<double, 3>, 3>;
const Matrix3& opponent_matrix() noexcept;

OpponentImage rgb_to_opponent(const ColorImage& img);
ColorImage opponent_to_rgb(const OpponentImage& img);

}  // namespace bayerpipe

#endif  // BAYERPIPE_COLOR_HPP_
