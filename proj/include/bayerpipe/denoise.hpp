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

#ifndef BAYERPIPE_DENOISE_HPP_
#define BAYERPIPE_DENOISE_HPP_

#include <string_view>
#include <vector>

#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"

namespace bayerpipe {

enum class DenoiserId { kIdentity, kDct8, kNlMeans };

std::string_view denoiser_name(DenoiserId id) noexcept;
// Accepts "identity", "dct8", "nlmeans".
DenoiserId parse_denoiser(std::string_view name);

// Sliding-window DCT hard thresholding.
struct DctConfig {
  int block = 8;
  int step = 4;
  // AC coefficients with |c| < threshold_gain * sigma are zeroed.
  double threshold_gain = 3.0;
};

// Non-local means guided by the luminance channel.
struct NlmConfig {
  int patch = 5;
  int window = 21;
  // Filtering parameter h = h_gain * sigma.
  double h_gain = 0.40;
};

struct DenoiseConfig {
  // Assumed noise standard deviation, in intensity units.
  double sigma = 0.0;
  DctConfig dct;
  NlmConfig nlm;

  // Throws ParameterError on a negative sigma, non-positive sizes, even
  // patch/window, or a step larger than the block.
  void validate() const;
};

// Denoises in the YC1C2 basis and converts back. sigma == 0 and kIdentity
// return the input unchanged.
ColorImage denoise_rgb(const ColorImage& img, DenoiserId id,
                       const DenoiseConfig& cfg);

// Splits the mosaic into two half-size RGB images, denoises each with the
// same configuration, and recombines them.
CfaImage denoise_cfa(const CfaImage& cfa, DenoiserId id,
                     const DenoiseConfig& cfg);

namespace detail {

// DCT hard thresholding of one channel.
Plane dct_denoise_plane(const Plane& img, const DctConfig& cfg, double sigma);

// NL-means weights around (row, col) of `guide`, row-major over the
// window x window search offsets. The center holds the self weight.
std::vector<double> nlm_weight_field(const Plane& guide, int row, int col,
                                     const NlmConfig& cfg, double sigma);

}  // namespace detail
}  // namespace bayerpipe

#endif  // BAYERPIPE_DENOISE_HPP_
