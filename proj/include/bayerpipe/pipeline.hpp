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

#ifndef BAYERPIPE_PIPELINE_HPP_
#define BAYERPIPE_PIPELINE_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "bayerpipe/demosaic.hpp"
#include "bayerpipe/denoise.hpp"
#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"

namespace bayerpipe {

// Two-stage blend weights and noise parameters:
//   v~ = alpha * DN1(v, sigma1) + (1 - alpha) * v
//   u^ = beta * DN2(DM(v~), sigma2) + (1 - beta) * DM(v~)
struct PipelineParams {
  double alpha = 0.0;   // weight of CFA denoising, [0, 1]
  double beta = 0.0;    // weight of color denoising, [0, 1]
  double sigma1 = 0.0;  // CFA denoiser noise parameter, [0, 255]
  double sigma2 = 0.0;  // color denoiser noise parameter, [0, 255]

  void validate() const;
  bool operator==(const PipelineParams&) const = default;
};

struct PipelineSpec {
  PipelineParams params;
  DenoiserId dn1 = DenoiserId::kDct8;
  DemosaicerId dm = DemosaicerId::kHamiltonAdams;
  DenoiserId dn2 = DenoiserId::kDct8;
  // Anscombe before, algebraic inverse after. Sigmas are then read on the
  // transformed scale.
  bool vst = false;
  // Block/patch settings shared by both denoisers; the sigma field is
  // overwritten by sigma1 / sigma2.
  DenoiseConfig denoiser;
};

// Wall-clock seconds spent per stage, accumulated across calls.
struct StageTimings {
  double demosaic_seconds = 0.0;
  double denoise_seconds = 0.0;
};

ColorImage run_pipeline(const CfaImage& v, const PipelineSpec& spec,
                        StageTimings* timings = nullptr);

enum class Preset { kDnDm, kDmDn, kDm15Dn };

std::string_view preset_name(Preset p) noexcept;
// Accepts "dndm", "dmdn", "dm15dn" (case-insensitive, '&' and '_' ignored).
Preset parse_preset(std::string_view name);

// DN&DM -> (1, 0, s, 0); DM&DN -> (0, 1, 0, s); DM&1.5DN -> (0, 1, 0, 1.5 s).
PipelineParams preset(Preset p, double sigma);

struct KScore {
  double k;
  double cpsnr;
};

// CPSNR of DM followed by DN with noise parameter k * sigma, for each k in
// order (duplicates kept).
std::vector<KScore> sweep_k(const CfaImage& v, const ColorImage& truth,
                            DemosaicerId dm, DenoiserId dn, double sigma,
                            std::span<const double> k_list,
                            const DenoiseConfig& denoiser = {});

// Rescales the input by sigma_ref / sigma_star, runs `spec` with
// `params_ref`, and undoes the scaling on the output.
ColorImage generalize_by_image(const CfaImage& v, double sigma_star,
                               double sigma_ref,
                               const PipelineParams& params_ref,
                               const PipelineSpec& spec);

// Keeps alpha and beta, scales sigma1 and sigma2 by sigma_star / sigma_ref,
// clamped to [0, 255].
PipelineParams generalize_by_sigma(const PipelineParams& params_ref,
                                   double sigma_ref, double sigma_star);

}  // namespace bayerpipe

#endif  // BAYERPIPE_PIPELINE_HPP_
