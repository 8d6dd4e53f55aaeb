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

#ifndef BAYERPIPE_MOSAIC_HPP_
#define BAYERPIPE_MOSAIC_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "bayerpipe/image.hpp"

namespace bayerpipe {

// Color at pixel (0,0) and its 2x2 block, read row by row.
enum class CfaPhase { kRggb, kGrbg, kGbrg, kBggr };

inline constexpr int kRed = 0;
inline constexpr int kGreen = 1;
inline constexpr int kBlue = 2;

// Channel index (kRed, kGreen, kBlue) sampled at (row, col).
int cfa_channel(CfaPhase phase, int row, int col) noexcept;

std::string_view phase_name(CfaPhase phase) noexcept;
// Accepts "RGGB", "GRBG", "GBRG", "BGGR" in any case.
CfaPhase parse_phase(std::string_view name);

// Position of each site inside a 2x2 Bayer block. G1 shares a row with R,
// G2 shares a row with B.
struct BlockLayout {
  int r_row, r_col;
  int g1_row, g1_col;
  int g2_row, g2_col;
  int b_row, b_col;
};
BlockLayout block_layout(CfaPhase phase) noexcept;

// Single-plane Bayer mosaic. Dimensions are even and at least 2x2.
class CfaImage {
 public:
  CfaImage() = default;
  CfaImage(Plane plane, CfaPhase phase);

  int width() const noexcept { return plane_.width(); }
  int height() const noexcept { return plane_.height(); }
  CfaPhase phase() const noexcept { return phase_; }
  const Plane& plane() const noexcept { return plane_; }

  double operator()(int row, int col) const noexcept { return plane_(row, col); }
  int channel_at(int row, int col) const noexcept {
    return cfa_channel(phase_, row, col);
  }

  bool operator==(const CfaImage&) const = default;

 private:
  Plane plane_;
  CfaPhase phase_ = CfaPhase::kRggb;
};

// Two half-resolution RGB images built from each Bayer block:
// first = (R, G1, B), second = (R, G2, B).
struct HalfPair {
  ColorImage first;
  ColorImage second;
};

// The four raw sites of each block as half-size planes.
struct QuadPlanes {
  GrayImage r;
  GrayImage g1;
  GrayImage g2;
  GrayImage b;
};

// Keeps the channel selected by the Bayer pattern at every pixel.
CfaImage mosaick(const ColorImage& img, CfaPhase phase = CfaPhase::kRggb);

HalfPair split_cfa(const CfaImage& cfa);
// Greens return to their own sites; duplicated R and B are averaged.
CfaImage recombine_cfa(const HalfPair& pair, CfaPhase phase);

QuadPlanes pack_quad(const CfaImage& cfa);
CfaImage unpack_quad(const QuadPlanes& quad, CfaPhase phase);

// A CFA is stored as a gray PFM plus a sidecar "<path>.meta" holding
// key=value lines, currently just "phase=RGGB".
void write_cfa(const std::filesystem::path& path, const CfaImage& cfa);
// Missing sidecar means RGGB.
CfaImage read_cfa(const std::filesystem::path& path);

}  // namespace bayerpipe

#endif  // BAYERPIPE_MOSAIC_HPP_
