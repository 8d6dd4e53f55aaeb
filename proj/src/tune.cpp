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

#include "bayerpipe/tune.hpp"

#include "bayerpipe/analysis.hpp"
#include "bayerpipe/error.hpp"
#include "bayerpipe/noise.hpp"

namespace bayerpipe {

NoisyDataset make_noisy_dataset(std::span<const ColorImage> truth,
                                double sigma, std::uint64_t master_seed,
                                CfaPhase phase) {
  if (truth.empty()) throw ParameterError("dataset is empty");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  NoisyDataset data;
  data.sigma = sigma;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const std::uint64_t seed = image_seed(master_seed, k);
    data.truth.push_back(truth[k]);
    data.noisy.push_back(add_awgn(mosaick(truth[k], phase), {sigma, seed}));
    data.seeds.push_back(seed);
  }
  return data;
}

DatasetScore evaluate_pipeline(const NoisyDataset& data,
                               const PipelineSpec& spec,
                               StageTimings* timings) {
  DatasetScore score;
  score.per_image.reserve(data.noisy.size());
  for (std::size_t k = 0; k < data.noisy.size(); ++k) {
    score.per_image.push_back(
        cpsnr(run_pipeline(data.noisy[k], spec, timings), data.truth[k]));
  }
  double sum = 0.0;
  for (double v : score.per_image) sum += v;
  score.mean = sum / static_cast<double>(score.per_image.size());
  return score;
}

BoxBounds pipeline_bounds() {
  return BoxBounds{{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 255.0, 255.0}};
}

PipelineParams params_from_vector(std::span<const double> x) {
  if (x.size() != 4) throw ParameterError("pipeline parameter vector needs 4 entries");
  return PipelineParams{x[0], x[1], x[2], x[3]};
}

std::vector<double> params_to_vector(const PipelineParams& p) {
  return {p.alpha, p.beta, p.sigma1, p.sigma2};
}

TuneResult tune_pipeline(std::span<const ColorImage> dataset, double sigma,
                         const PipelineSpec& components, const CmaConfig& cfg) {
  return tune_pipeline(make_noisy_dataset(dataset, sigma, cfg.seed),
                       components, cfg);
}

TuneResult tune_pipeline(const NoisyDataset& data,
                         const PipelineSpec& components, const CmaConfig& cfg) {
  if (data.noisy.empty()) throw ParameterError("tune_pipeline: empty dataset");
  const Objective objective = [&](std::span<const double> x) {
    PipelineSpec spec = components;
    spec.params = params_from_vector(x);
    return evaluate_pipeline(data, spec).mean;
  };
  return cmaes_maximize(objective, pipeline_bounds(), cfg);
}

}  // namespace bayerpipe
