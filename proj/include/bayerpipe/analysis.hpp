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

#ifndef BAYERPIPE_ANALYSIS_HPP_
#define BAYERPIPE_ANALYSIS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bayerpipe/demosaic.hpp"
#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"

namespace bayerpipe {

// Mean squared error over all samples of all three channels.
double mse(const ColorImage& estimate, const ColorImage& truth);
double rmse(const ColorImage& estimate, const ColorImage& truth);
// 10 log10(255^2 / MSE); +infinity when the images are identical.
double cpsnr(const ColorImage& estimate, const ColorImage& truth);

// Demosaiced noise: estimate minus ground truth, per channel.
struct Residual {
  ColorImage values;
};

Residual residual(const ColorImage& demosaiced, const ColorImage& truth);

enum class StatsSpace { kRgb, kYc1c2 };

std::string_view stats_space_name(StatsSpace s) noexcept;
// Accepts "rgb" and "yc1c2".
StatsSpace parse_stats_space(std::string_view name);

inline constexpr int kMaxLag = 2;
inline constexpr int kLags = kMaxLag + 1;

using LagTable = std::array<std::array<double, kLags>, kLags>;
using ChannelMatrix = std::array<std::array<double, 3>, 3>;

// Second-order statistics of a residual. Lag tables are indexed
// [channel][s][t] for the pair (i, j), (i + s, j + t), s the row offset.
struct NoiseStats {
  StatsSpace space = StatsSpace::kRgb;
  std::array<double, 3> variance{};
  std::array<LagTable, 3> cov{};
  std::array<LagTable, 3> corr{};
  ChannelMatrix cross_cov{};
  ChannelMatrix cross_corr{};
  // A channel with zero variance has all its correlations reported as 0.
  std::array<bool, 3> degenerate{};
  std::size_t samples = 0;
};

// Mean-removed statistics over the image minus a border_crop frame. All
// sums are divided by the sample count N of the cropped region, lagged ones
// included, which keeps every |corr| <= 1.
// Throws DimensionError unless each side exceeds 2 * border_crop + 3.
NoiseStats noise_stats(const Residual& res, StatsSpace space,
                       int border_crop = 8);

// Equal-weight average of per-image statistics. Degenerate flags are OR-ed.
NoiseStats average_stats(std::span<const NoiseStats> stats);

// sqrt(Var(Y)) / sigma. Requires YC1C2 statistics.
double amplification_factor(const NoiseStats& stats, double sigma);

struct RmseRow {
  double sigma = 0.0;
  double mean_rmse = 0.0;
  std::vector<double> per_image;
};

// Mean RMSE of demosaic(mosaick(u) + noise) against u for each sigma. Image
// k uses the noise seed image_seed(seed, k) at every sigma, so rows differ
// only by the noise amplitude.
std::vector<RmseRow> rmse_table(std::span<const ColorImage> dataset,
                                DemosaicerId dm,
                                std::span<const double> sigmas,
                                std::uint64_t seed,
                                CfaPhase phase = CfaPhase::kRggb);

}  // namespace bayerpipe

#endif  // BAYERPIPE_ANALYSIS_HPP_
