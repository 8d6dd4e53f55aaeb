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

#include "bayerpipe/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "bayerpipe/color.hpp"
#include "bayerpipe/demosaic.hpp"
#include "bayerpipe/error.hpp"

namespace bayerpipe {
namespace {

// Orthonormal DCT-II basis, row k holds frequency k.
std::vector<double> dct_matrix(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int x = 0; x < n; ++x) {
      m[k * n + x] =
          scale * std::cos(std::numbers::pi * (2 * x + 1) * k / (2.0 * n));
    }
  }
  return m;
}

// out = a * b for n x n row-major matrices; `bt` selects b transposed.
void matmul(const double* a, const double* b, double* out, int n, bool bt) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += a[i * n + k] * (bt ? b[j * n + k] : b[k * n + j]);
      }
      out[i * n + j] = acc;
    }
  }
}

void transpose_into(const double* a, double* out, int n) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[j * n + i] = a[i * n + j];
}

OpponentImage map_channels(const OpponentImage& img, auto&& f) {
  return OpponentImage(f(img.channel(0)), f(img.channel(1)), f(img.channel(2)));
}

ColorImage dct_denoise(const ColorImage& img, const DenoiseConfig& cfg) {
  const OpponentImage opp = rgb_to_opponent(img);
  return opponent_to_rgb(map_channels(opp, [&](const Plane& p) {
    return detail::dct_denoise_plane(p, cfg.dct, cfg.sigma);
  }));
}

// Squared patch distances for one search offset, for every pixel, using
// separable box sums over the padded guide.
void patch_distances(const Plane& guide, int pad, int half_patch, int dy,
                     int dx, int w, int h, std::vector<double>& diff,
                     std::vector<double>& column, std::vector<double>& out) {
  const int span = 2 * half_patch + 1;
  const int rw = w + 2 * half_patch;
  const int rh = h + 2 * half_patch;
  const int r0 = pad - half_patch;
  for (int r = 0; r < rh; ++r) {
    for (int c = 0; c < rw; ++c) {
      const double d = guide(r0 + r, r0 + c) - guide(r0 + r + dy, r0 + c + dx);
      diff[static_cast<std::size_t>(r) * rw + c] = d * d;
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < rw; ++c) {
      double acc = 0.0;
      for (int a = 0; a < span; ++a) {
        acc += diff[static_cast<std::size_t>(r + a) * rw + c];
      }
      column[static_cast<std::size_t>(r) * rw + c] = acc;
    }
  }
  const double norm = 1.0 / (span * span);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int b = 0; b < span; ++b) {
        acc += column[static_cast<std::size_t>(r) * rw + c + b];
      }
      out[static_cast<std::size_t>(r) * w + c] = acc * norm;
    }
  }
}

double nlm_weight(double d2, double sigma, double h2) {
  return std::exp(-std::max(d2 - 2.0 * sigma * sigma, 0.0) / h2);
}

ColorImage nlm_denoise(const ColorImage& img, const DenoiseConfig& cfg) {
  const int w = img.width(), h = img.height();
  const int half_window = cfg.nlm.window / 2;
  const int half_patch = cfg.nlm.patch / 2;
  const int pad = half_window + half_patch;
  const double h_param = cfg.nlm.h_gain * cfg.sigma;
  const double h2 = h_param * h_param;

  const OpponentImage opp = rgb_to_opponent(img);
  const Plane padded[3] = {pad_reflect(opp.channel(0), pad),
                           pad_reflect(opp.channel(1), pad),
                           pad_reflect(opp.channel(2), pad)};
  const Plane& guide = padded[0];

  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> num[3] = {std::vector<double>(n, 0.0),
                                std::vector<double>(n, 0.0),
                                std::vector<double>(n, 0.0)};
  std::vector<double> den(n, 0.0);
  std::vector<double> max_weight(n, 0.0);

  const int rw = w + 2 * half_patch, rh = h + 2 * half_patch;
  std::vector<double> diff(static_cast<std::size_t>(rw) * rh);
  std::vector<double> column(static_cast<std::size_t>(rw) * h);
  std::vector<double> dist(n);

  for (int dy = -half_window; dy <= half_window; ++dy) {
    for (int dx = -half_window; dx <= half_window; ++dx) {
      if (dy == 0 && dx == 0) continue;
      patch_distances(guide, pad, half_patch, dy, dx, w, h, diff, column, dist);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const std::size_t k = static_cast<std::size_t>(r) * w + c;
          const double wt = nlm_weight(dist[k], cfg.sigma, h2);
          if (wt == 0.0) continue;
          const int qr = r + pad + dy, qc = c + pad + dx;
          num[0][k] += wt * padded[0](qr, qc);
          num[1][k] += wt * padded[1](qr, qc);
          num[2][k] += wt * padded[2](qr, qc);
          den[k] += wt;
          max_weight[k] = std::max(max_weight[k], wt);
        }
      }
    }
  }

  OpponentImage out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * w + c;
      // Self weight equals the largest neighbor weight.
      const double self = max_weight[k] > 0.0 ? max_weight[k] : 1.0;
      const double total = den[k] + self;
      for (int ch = 0; ch < 3; ++ch) {
        out(ch, r, c) = (num[ch][k] + self * opp(ch, r, c)) / total;
      }
    }
  }
  return opponent_to_rgb(out);
}

}  // namespace

std::string_view denoiser_name(DenoiserId id) noexcept {
  switch (id) {
    case DenoiserId::kIdentity: return "identity";
    case DenoiserId::kDct8: return "dct8";
    case DenoiserId::kNlMeans: return "nlmeans";
  }
  return "identity";
}

DenoiserId parse_denoiser(std::string_view name) {
  if (name == "identity" || name == "none") return DenoiserId::kIdentity;
  if (name == "dct8" || name == "dct") return DenoiserId::kDct8;
  if (name == "nlmeans" || name == "nlm") return DenoiserId::kNlMeans;
  throw ParameterError("unknown denoiser '" + std::string(name) +
                       "' (expected identity, dct8 or nlmeans)");
}

void DenoiseConfig::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("denoiser sigma must be finite and >= 0");
  }
  if (dct.block <= 0 || dct.step <= 0 || dct.step > dct.block) {
    throw ParameterError("DCT block and step must be positive, step <= block");
  }
  if (!(dct.threshold_gain >= 0.0)) {
    throw ParameterError("DCT threshold gain must be >= 0");
  }
  if (nlm.patch <= 0 || nlm.window <= 0 || nlm.patch % 2 == 0 ||
      nlm.window % 2 == 0) {
    throw ParameterError("NL-means patch and window must be positive and odd");
  }
  if (!(nlm.h_gain > 0.0)) throw ParameterError("NL-means h gain must be > 0");
}

ColorImage denoise_rgb(const ColorImage& img, DenoiserId id,
                       const DenoiseConfig& cfg) {
  cfg.validate();
  if (id == DenoiserId::kIdentity || cfg.sigma == 0.0) return img;
  switch (id) {
    case DenoiserId::kDct8: return dct_denoise(img, cfg);
    case DenoiserId::kNlMeans: return nlm_denoise(img, cfg);
    case DenoiserId::kIdentity: break;
  }
  return img;
}

CfaImage denoise_cfa(const CfaImage& cfa, DenoiserId id,
                     const DenoiseConfig& cfg) {
  HalfPair pair = split_cfa(cfa);
  pair.first = denoise_rgb(pair.first, id, cfg);
  pair.second = denoise_rgb(pair.second, id, cfg);
  return recombine_cfa(pair, cfa.phase());
}

namespace detail {

Plane dct_denoise_plane(const Plane& img, const DctConfig& cfg, double sigma) {
  const int n = cfg.block;
  const int w = img.width(), h = img.height();
  const Plane padded = pad_reflect(img, n);
  const std::vector<double> basis = dct_matrix(n);
  std::vector<double> basis_t(basis.size());
  transpose_into(basis.data(), basis_t.data(), n);

  const double threshold = cfg.threshold_gain * sigma;
  Plane acc(w, h);
  Plane count(w, h);
  std::vector<double> block(n * n), tmp(n * n), coeff(n * n);

  // Block origins start at step - block so every pixel is covered by the
  // same number of blocks.
  for (int by = cfg.step - n; by < h; by += cfg.step) {
    for (int bx = cfg.step - n; bx < w; bx += cfg.step) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          block[i * n + j] = padded(by + i + n, bx + j + n);

      matmul(basis.data(), block.data(), tmp.data(), n, false);
      matmul(tmp.data(), basis.data(), coeff.data(), n, true);
      for (int k = 1; k < n * n; ++k) {
        if (std::fabs(coeff[k]) < threshold) coeff[k] = 0.0;
      }
      matmul(basis_t.data(), coeff.data(), tmp.data(), n, false);
      matmul(tmp.data(), basis_t.data(), block.data(), n, true);

      for (int i = 0; i < n; ++i) {
        const int y = by + i;
        if (y < 0 || y >= h) continue;
        for (int j = 0; j < n; ++j) {
          const int x = bx + j;
          if (x < 0 || x >= w) continue;
          acc(y, x) += block[i * n + j];
          count(y, x) += 1.0;
        }
      }
    }
  }
  auto av = acc.values();
  auto cv = count.values();
  for (std::size_t k = 0; k < av.size(); ++k) av[k] /= cv[k];
  return acc;
}

std::vector<double> nlm_weight_field(const Plane& guide, int row, int col,
                                     const NlmConfig& cfg, double sigma) {
  const int half_window = cfg.window / 2;
  const int half_patch = cfg.patch / 2;
  const double h_param = cfg.h_gain * sigma;
  const double h2 = h_param * h_param;
  const int w = guide.width(), h = guide.height();
  auto at = [&](int r, int c) {
    return guide(reflect_index(r, h), reflect_index(c, w));
  };

  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(cfg.window) * cfg.window);
  double max_weight = 0.0;
  std::size_t center = 0;
  for (int dy = -half_window; dy <= half_window; ++dy) {
    for (int dx = -half_window; dx <= half_window; ++dx) {
      if (dy == 0 && dx == 0) {
        center = weights.size();
        weights.push_back(0.0);
        continue;
      }
      double d2 = 0.0;
      for (int a = -half_patch; a <= half_patch; ++a) {
        for (int b = -half_patch; b <= half_patch; ++b) {
          const double d = at(row + a, col + b) - at(row + dy + a, col + dx + b);
          d2 += d * d;
        }
      }
      d2 /= static_cast<double>(cfg.patch * cfg.patch);
      const double wt = nlm_weight(d2, sigma, h2);
      max_weight = std::max(max_weight, wt);
      weights.push_back(wt);
    }
  }
  weights[center] = max_weight > 0.0 ? max_weight : 1.0;
  return weights;
}

}  // namespace detail
}  // namespace bayerpipe
