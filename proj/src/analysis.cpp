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

#include "bayerpipe/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bayerpipe/color.hpp"
#include "bayerpipe/error.hpp"
#include "bayerpipe/noise.hpp"

namespace bayerpipe {
namespace {

// Neumaier compensated summation; the result does not depend on how large
// the running total gets relative to the terms.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

constexpr double kDegenerateVariance = 1e-24;

void require_same(const ColorImage& a, const ColorImage& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": image sizes differ (" +
                         std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " +
                         std::to_string(b.width()) + "x" +
                         std::to_string(b.height()) + ")");
  }
}

}  // namespace

double mse(const ColorImage& estimate, const ColorImage& truth) {
  require_same(estimate, truth, "mse");
  CompensatedSum sum;
  for (int c = 0; c < 3; ++c) {
    auto e = estimate.channel(c).values();
    auto t = truth.channel(c).values();
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double d = e[k] - t[k];
      sum.add(d * d);
    }
  }
  return sum.value() / (3.0 * static_cast<double>(truth.pixel_count()));
}

double rmse(const ColorImage& estimate, const ColorImage& truth) {
  return std::sqrt(mse(estimate, truth));
}

double cpsnr(const ColorImage& estimate, const ColorImage& truth) {
  const double m = mse(estimate, truth);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

Residual residual(const ColorImage& demosaiced, const ColorImage& truth) {
  require_same(demosaiced, truth, "residual");
  return Residual{blend(demosaiced, 1.0, truth, -1.0)};
}

std::string_view stats_space_name(StatsSpace s) noexcept {
  return s == StatsSpace::kRgb ? "rgb" : "yc1c2";
}

StatsSpace parse_stats_space(std::string_view name) {
  if (name == "rgb" || name == "RGB") return StatsSpace::kRgb;
  if (name == "yc1c2" || name == "YC1C2" || name == "ycc") {
    return StatsSpace::kYc1c2;
  }
  throw ParameterError("unknown color space '" + std::string(name) +
                       "' (expected rgb or yc1c2)");
}

NoiseStats noise_stats(const Residual& res, StatsSpace space, int border_crop) {
  const ColorImage& img = res.values;
  if (border_crop < 0) throw ParameterError("border crop must be >= 0");
  const int min_side = 2 * border_crop + 3;
  if (img.width() <= min_side || img.height() <= min_side) {
    throw DimensionError("noise_stats: image " + std::to_string(img.width()) +
                         "x" + std::to_string(img.height()) +
                         " too small for border crop " +
                         std::to_string(border_crop));
  }

  std::array<Plane, 3> planes;
  if (space == StatsSpace::kYc1c2) {
    const OpponentImage opp = rgb_to_opponent(img);
    for (int c = 0; c < 3; ++c) planes[c] = opp.channel(c);
  } else {
    for (int c = 0; c < 3; ++c) planes[c] = img.channel(c);
  }

  const int rh = img.height() - 2 * border_crop;
  const int rw = img.width() - 2 * border_crop;
  const std::size_t n = static_cast<std::size_t>(rh) * rw;

  // Centered samples of the cropped region.
  std::array<Plane, 3> centered;
  for (int c = 0; c < 3; ++c) {
    CompensatedSum sum;
    for (int i = 0; i < rh; ++i)
      for (int j = 0; j < rw; ++j)
        sum.add(planes[c](i + border_crop, j + border_crop));
    const double mean = sum.value() / static_cast<double>(n);
    centered[c] = Plane(rw, rh);
    for (int i = 0; i < rh; ++i)
      for (int j = 0; j < rw; ++j)
        centered[c](i, j) = planes[c](i + border_crop, j + border_crop) - mean;
  }

  NoiseStats stats;
  stats.space = space;
  stats.samples = n;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int c = 0; c < 3; ++c) {
    const Plane& x = centered[c];
    for (int s = 0; s < kLags; ++s) {
      for (int t = 0; t < kLags; ++t) {
        CompensatedSum sum;
        for (int i = 0; i + s < rh; ++i)
          for (int j = 0; j + t < rw; ++j) sum.add(x(i, j) * x(i + s, j + t));
        stats.cov[c][s][t] = sum.value() * inv_n;
      }
    }
    stats.variance[c] = stats.cov[c][0][0];
    stats.degenerate[c] = !(stats.variance[c] > kDegenerateVariance);
    for (int s = 0; s < kLags; ++s)
      for (int t = 0; t < kLags; ++t)
        stats.corr[c][s][t] =
            stats.degenerate[c] ? 0.0 : stats.cov[c][s][t] / stats.variance[c];
  }

  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      double cov;
      if (a == b) {
        cov = stats.variance[a];
      } else {
        CompensatedSum sum;
        auto xa = centered[a].values();
        auto xb = centered[b].values();
        for (std::size_t k = 0; k < n; ++k) sum.add(xa[k] * xb[k]);
        cov = sum.value() * inv_n;
      }
      stats.cross_cov[a][b] = stats.cross_cov[b][a] = cov;
      double corr;
      if (stats.degenerate[a] || stats.degenerate[b]) {
        corr = 0.0;
      } else if (a == b) {
        corr = 1.0;
      } else {
        corr = cov / std::sqrt(stats.variance[a] * stats.variance[b]);
      }
      stats.cross_corr[a][b] = stats.cross_corr[b][a] = corr;
    }
  }
  return stats;
}

NoiseStats average_stats(std::span<const NoiseStats> stats) {
  if (stats.empty()) throw ParameterError("average_stats: no statistics");
  NoiseStats avg;
  avg.space = stats.front().space;
  const double w = 1.0 / static_cast<double>(stats.size());
  for (const NoiseStats& s : stats) {
    if (s.space != avg.space) {
      throw ParameterError("average_stats: mixed color spaces");
    }
    avg.samples += s.samples;
    for (int c = 0; c < 3; ++c) {
      avg.variance[c] += w * s.variance[c];
      avg.degenerate[c] = avg.degenerate[c] || s.degenerate[c];
      for (int i = 0; i < kLags; ++i)
        for (int j = 0; j < kLags; ++j) {
          avg.cov[c][i][j] += w * s.cov[c][i][j];
          avg.corr[c][i][j] += w * s.corr[c][i][j];
        }
      for (int b = 0; b < 3; ++b) {
        avg.cross_cov[c][b] += w * s.cross_cov[c][b];
        avg.cross_corr[c][b] += w * s.cross_corr[c][b];
      }
    }
  }
  return avg;
}

double amplification_factor(const NoiseStats& stats, double sigma) {
  if (stats.space != StatsSpace::kYc1c2) {
    throw ParameterError("amplification_factor needs YC1C2 statistics");
  }
  if (!(sigma > 0.0)) throw ParameterError("amplification_factor: sigma <= 0");
  return std::sqrt(stats.variance[0]) / sigma;
}

std::vector<RmseRow> rmse_table(std::span<const ColorImage> dataset,
                                DemosaicerId dm,
                                std::span<const double> sigmas,
                                std::uint64_t seed, CfaPhase phase) {
  if (dataset.empty()) throw ParameterError("rmse_table: empty dataset");
  std::vector<CfaImage> clean;
  clean.reserve(dataset.size());
  for (const ColorImage& u : dataset) clean.push_back(mosaick(u, phase));

  std::vector<RmseRow> rows;
  for (double sigma : sigmas) {
    RmseRow row;
    row.sigma = sigma;
    for (std::size_t k = 0; k < dataset.size(); ++k) {
      const CfaImage noisy = add_awgn(clean[k], {sigma, image_seed(seed, k)});
      row.per_image.push_back(rmse(demosaic(noisy, dm), dataset[k]));
    }
    double sum = 0.0;
    for (double r : row.per_image) sum += r;
    row.mean_rmse = sum / static_cast<double>(row.per_image.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bayerpipe
