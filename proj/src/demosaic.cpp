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

#include "bayerpipe/demosaic.hpp"

#include <cmath>
#include <string>

#include "bayerpipe/error.hpp"

namespace bayerpipe {
namespace {

constexpr int kBorder = 2;

// Mean of the nearest samples of channel `target` around padded position
// (pi, pj), whose own channel is `own`. Works on any plane laid out on the
// Bayer grid of `phase` (raw samples or color differences).
double neighbor_mean(const Plane& p, CfaPhase phase, int own, int target,
                     int pi, int pj) {
  if (target == kGreen) {
    return 0.25 * (p(pi - 1, pj) + p(pi + 1, pj) + p(pi, pj - 1) +
                   p(pi, pj + 1));
  }
  if (own == kGreen) {
    // Padded coordinates share parity with image coordinates.
    if (cfa_channel(phase, pi, pj + 1) == target) {
      return 0.5 * (p(pi, pj - 1) + p(pi, pj + 1));
    }
    return 0.5 * (p(pi - 1, pj) + p(pi + 1, pj));
  }
  return 0.25 * (p(pi - 1, pj - 1) + p(pi - 1, pj + 1) + p(pi + 1, pj - 1) +
                 p(pi + 1, pj + 1));
}

ColorImage bilinear(const CfaImage& cfa) {
  const Plane p = pad_reflect(cfa.plane(), kBorder);
  const CfaPhase phase = cfa.phase();
  ColorImage out(cfa.width(), cfa.height());
  for (int i = 0; i < cfa.height(); ++i) {
    for (int j = 0; j < cfa.width(); ++j) {
      const int own = cfa.channel_at(i, j);
      const int pi = i + kBorder, pj = j + kBorder;
      for (int c = 0; c < 3; ++c) {
        out(c, i, j) =
            c == own ? p(pi, pj) : neighbor_mean(p, phase, own, c, pi, pj);
      }
    }
  }
  return out;
}

// Green at an R or B site, directed by the smaller of the horizontal and
// vertical gradients. Ties average both directional estimates.
double hamilton_adams_green(const Plane& p, int pi, int pj) {
  const double center2 = 2.0 * p(pi, pj);
  const double lap_h = center2 - p(pi, pj - 2) - p(pi, pj + 2);
  const double lap_v = center2 - p(pi - 2, pj) - p(pi + 2, pj);
  const double grad_h = std::fabs(p(pi, pj - 1) - p(pi, pj + 1)) + std::fabs(lap_h);
  const double grad_v = std::fabs(p(pi - 1, pj) - p(pi + 1, pj)) + std::fabs(lap_v);
  const double est_h = 0.5 * (p(pi, pj - 1) + p(pi, pj + 1)) + 0.25 * lap_h;
  const double est_v = 0.5 * (p(pi - 1, pj) + p(pi + 1, pj)) + 0.25 * lap_v;
  if (grad_h < grad_v) return est_h;
  if (grad_v < grad_h) return est_v;
  return 0.5 * (est_h + est_v);
}

ColorImage hamilton_adams(const CfaImage& cfa) {
  const int w = cfa.width(), h = cfa.height();
  const Plane p = pad_reflect(cfa.plane(), kBorder);
  const CfaPhase phase = cfa.phase();

  Plane green(w, h);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      green(i, j) = cfa.channel_at(i, j) == kGreen
                        ? cfa(i, j)
                        : hamilton_adams_green(p, i + kBorder, j + kBorder);
    }
  }

  // R-G at R sites and B-G at B sites; green sites are never read.
  Plane diff(w, h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      if (cfa.channel_at(i, j) != kGreen) diff(i, j) = cfa(i, j) - green(i, j);
  const Plane dp = pad_reflect(diff, kBorder);

  ColorImage out(w, h);
  out.channel(kGreen) = green;
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const int own = cfa.channel_at(i, j);
      for (int c : {kRed, kBlue}) {
        out(c, i, j) = c == own ? cfa(i, j)
                                : green(i, j) + neighbor_mean(dp, phase, own, c,
                                                              i + kBorder,
                                                              j + kBorder);
      }
    }
  }
  return out;
}

// 5x5 kernels, scaled by 8. Rows index the vertical offset -2..2.
using Kernel = double[5][5];

// Green at R or B sites.
constexpr Kernel kGreenAtChroma = {
    {0, 0, -1, 0, 0}, {0, 0, 2, 0, 0}, {-1, 2, 4, 2, -1},
    {0, 0, 2, 0, 0},  {0, 0, -1, 0, 0}};
// R (or B) at a green site whose row holds R (or B).
constexpr Kernel kChromaAtGreenRow = {
    {0, 0, 0.5, 0, 0}, {0, -1, 0, -1, 0}, {-1, 4, 5, 4, -1},
    {0, -1, 0, -1, 0}, {0, 0, 0.5, 0, 0}};
// R (or B) at a green site whose column holds R (or B).
constexpr Kernel kChromaAtGreenCol = {
    {0, 0, -1, 0, 0}, {0, -1, 4, -1, 0}, {0.5, 0, 5, 0, 0.5},
    {0, -1, 4, -1, 0}, {0, 0, -1, 0, 0}};
// R at B sites and B at R sites.
constexpr Kernel kChromaAtChroma = {
    {0, 0, -1.5, 0, 0}, {0, 2, 0, 2, 0}, {-1.5, 0, 6, 0, -1.5},
    {0, 2, 0, 2, 0},    {0, 0, -1.5, 0, 0}};

double apply_kernel(const Plane& p, const Kernel& k, int pi, int pj) {
  double acc = 0.0;
  for (int di = -2; di <= 2; ++di)
    for (int dj = -2; dj <= 2; ++dj) {
      const double weight = k[di + 2][dj + 2];
      if (weight != 0.0) acc += weight * p(pi + di, pj + dj);
    }
  return acc / 8.0;
}

ColorImage malvar(const CfaImage& cfa) {
  const Plane p = pad_reflect(cfa.plane(), kBorder);
  const CfaPhase phase = cfa.phase();
  ColorImage out(cfa.width(), cfa.height());
  for (int i = 0; i < cfa.height(); ++i) {
    for (int j = 0; j < cfa.width(); ++j) {
      const int own = cfa.channel_at(i, j);
      const int pi = i + kBorder, pj = j + kBorder;
      for (int c = 0; c < 3; ++c) {
        double v;
        if (c == own) {
          v = p(pi, pj);
        } else if (c == kGreen) {
          v = apply_kernel(p, kGreenAtChroma, pi, pj);
        } else if (own == kGreen) {
          const bool in_row = cfa_channel(phase, i, j + 1) == c;
          v = apply_kernel(p, in_row ? kChromaAtGreenRow : kChromaAtGreenCol,
                           pi, pj);
        } else {
          v = apply_kernel(p, kChromaAtChroma, pi, pj);
        }
        out(c, i, j) = v;
      }
    }
  }
  return out;
}

}  // namespace

std::string_view demosaicer_name(DemosaicerId id) noexcept {
  switch (id) {
    case DemosaicerId::kBilinear: return "bilinear";
    case DemosaicerId::kHamiltonAdams: return "ha";
    case DemosaicerId::kMalvar: return "malvar";
  }
  return "bilinear";
}

DemosaicerId parse_demosaicer(std::string_view name) {
  if (name == "bilinear") return DemosaicerId::kBilinear;
  if (name == "ha" || name == "hamilton-adams") return DemosaicerId::kHamiltonAdams;
  if (name == "malvar") return DemosaicerId::kMalvar;
  throw ParameterError("unknown demosaicer '" + std::string(name) +
                       "' (expected bilinear, ha or malvar)");
}

Plane pad_reflect(const Plane& img, int border) {
  const int w = img.width(), h = img.height();
  Plane out(w + 2 * border, h + 2 * border);
  for (int i = 0; i < out.height(); ++i) {
    const int si = reflect_index(i - border, h);
    for (int j = 0; j < out.width(); ++j) {
      out(i, j) = img(si, reflect_index(j - border, w));
    }
  }
  return out;
}

ColorImage demosaic(const CfaImage& cfa, DemosaicerId id) {
  switch (id) {
    case DemosaicerId::kBilinear: return bilinear(cfa);
    case DemosaicerId::kHamiltonAdams: return hamilton_adams(cfa);
    case DemosaicerId::kMalvar: return malvar(cfa);
  }
  throw ParameterError("unknown demosaicer id");
}

}  // namespace bayerpipe
