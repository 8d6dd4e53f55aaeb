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

#ifndef BAYERPIPE_TUNE_HPP_
#define BAYERPIPE_TUNE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "bayerpipe/cmaes.hpp"
#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"
#include "bayerpipe/pipeline.hpp"

namespace bayerpipe {

// Ground truths together with their frozen noisy mosaics.
struct NoisyDataset {
  std::vector<ColorImage> truth;
  std::vector<CfaImage> noisy;
  std::vector<std::uint64_t> seeds;  // per-image noise seeds
  double sigma = 0.0;
};

// Mosaics every image and adds AWGN with seed image_seed(master_seed, k).
NoisyDataset make_noisy_dataset(std::span<const ColorImage> truth,
                                double sigma, std::uint64_t master_seed,
                                CfaPhase phase = CfaPhase::kRggb);

struct DatasetScore {
  std::vector<double> per_image;
  double mean = 0.0;
};

// CPSNR of run_pipeline on every noisy image; the mean is summed in image
// order so it does not depend on scheduling.
DatasetScore evaluate_pipeline(const NoisyDataset& data,
                               const PipelineSpec& spec,
                               StageTimings* timings = nullptr);

// Box of the tuned parameters: alpha, beta in [0, 1]; sigma1, sigma2 in
// [0, 255].
BoxBounds pipeline_bounds();
PipelineParams params_from_vector(std::span<const double> x);
std::vector<double> params_to_vector(const PipelineParams& p);

// Maximizes mean CPSNR over (alpha, beta, sigma1, sigma2). The noisy data is
// generated once from cfg.seed, so the objective is deterministic. The
// component ids and denoiser settings come from `components`; its params
// are ignored.
TuneResult tune_pipeline(std::span<const ColorImage> dataset, double sigma,
                         const PipelineSpec& components, const CmaConfig& cfg);

// Same, on an already generated dataset.
TuneResult tune_pipeline(const NoisyDataset& data,
                         const PipelineSpec& components, const CmaConfig& cfg);

}  // namespace bayerpipe

#endif  // BAYERPIPE_TUNE_HPP_
