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

#ifndef BAYERPIPE_DEMOSAIC_HPP_
#define BAYERPIPE_DEMOSAIC_HPP_

#include <string_view>

#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"

namespace bayerpipe {

enum class DemosaicerId { kBilinear, kHamiltonAdams, kMalvar };

std::string_view demosaicer_name(DemosaicerId id) noexcept;
// Accepts "bilinear", "ha", "malvar".
DemosaicerId parse_demosaicer(std::string_view name);

// Full-color reconstruction of a Bayer mosaic. Observed samples are kept
// unchanged at their sites; borders are mirror padded.
//
//   kBilinear       mean of the nearest same-channel neighbors.
//   kHamiltonAdams  gradient-directed green with a second-order correction,
//                   then bilinear interpolation of R-G and B-G.
//   kMalvar         fixed 5x5 gradient-corrected linear filters.
ColorImage demosaic(const CfaImage& cfa, DemosaicerId id);

// Reflect-pads `img` by `border` samples on every side.
Plane pad_reflect(const Plane& img, int border);

}  // namespace bayerpipe

#endif  // BAYERPIPE_DEMOSAIC_HPP_
