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

#include "bayerpipe/mosaic.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>
#include <utility>

#include "bayerpipe/error.hpp"
#include "bayerpipe/image_io.hpp"

namespace bayerpipe {
namespace {

// Channel pattern of each phase, row-major over the 2x2 block.
constexpr int kPatterns[4][4] = {
    {kRed, kGreen, kGreen, kBlue},  // RGGB
    {kGreen, kRed, kBlue, kGreen},  // GRBG
    {kGreen, kBlue, kRed, kGreen},  // GBRG
    {kBlue, kGreen, kGreen, kRed},  // BGGR
};

void require_even(int width, int height, const char* op) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
    throw DimensionError(std::string(op) + ": Bayer images need even "
                         "dimensions of at least 2x2, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

int cfa_channel(CfaPhase phase, int row, int col) noexcept {
  return kPatterns[static_cast<int>(phase)][((row & 1) << 1) | (col & 1)];
}

std::string_view phase_name(CfaPhase phase) noexcept {
  switch (phase) {
    case CfaPhase::kRggb: return "RGGB";
    case CfaPhase::kGrbg: return "GRBG";
    case CfaPhase::kGbrg: return "GBRG";
    case CfaPhase::kBggr: return "BGGR";
  }
  return "RGGB";
}

CfaPhase parse_phase(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  for (CfaPhase p : {CfaPhase::kRggb, CfaPhase::kGrbg, CfaPhase::kGbrg,
                     CfaPhase::kBggr}) {
    if (phase_name(p) == upper) return p;
  }
  throw ParameterError("unknown CFA phase '" + std::string(name) + "'");
}

BlockLayout block_layout(CfaPhase phase) noexcept {
  BlockLayout l{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const int ch = cfa_channel(phase, r, c);
      if (ch == kRed) {
        l.r_row = r;
        l.r_col = c;
        l.g1_row = r;
        l.g1_col = 1 - c;
      } else if (ch == kBlue) {
        l.b_row = r;
        l.b_col = c;
        l.g2_row = r;
        l.g2_col = 1 - c;
      }
    }
  }
  return l;
}

CfaImage::CfaImage(Plane plane, CfaPhase phase)
    : plane_(std::move(plane)), phase_(phase) {
  require_even(plane_.width(), plane_.height(), "CfaImage");
  if (!plane_.is_finite()) throw DomainError("CfaImage: non-finite sample");
}

CfaImage mosaick(const ColorImage& img, CfaPhase phase) {
  require_even(img.width(), img.height(), "mosaick");
  Plane out(img.width(), img.height());
  for (int row = 0; row < img.height(); ++row)
    for (int col = 0; col < img.width(); ++col)
      out(row, col) = img(cfa_channel(phase, row, col), row, col);
  return CfaImage(std::move(out), phase);
}

HalfPair split_cfa(const CfaImage& cfa) {
  const BlockLayout l = block_layout(cfa.phase());
  const int hw = cfa.width() / 2, hh = cfa.height() / 2;
  HalfPair pair{ColorImage(hw, hh), ColorImage(hw, hh)};
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < hw; ++x) {
      const int r0 = 2 * y, c0 = 2 * x;
      const double r = cfa(r0 + l.r_row, c0 + l.r_col);
      const double b = cfa(r0 + l.b_row, c0 + l.b_col);
      pair.first(kRed, y, x) = r;
      pair.first(kGreen, y, x) = cfa(r0 + l.g1_row, c0 + l.g1_col);
      pair.first(kBlue, y, x) = b;
      pair.second(kRed, y, x) = r;
      pair.second(kGreen, y, x) = cfa(r0 + l.g2_row, c0 + l.g2_col);
      pair.second(kBlue, y, x) = b;
    }
  }
  return pair;
}

CfaImage recombine_cfa(const HalfPair& pair, CfaPhase phase) {
  if (!pair.first.same_shape(pair.second)) {
    throw DimensionError("recombine_cfa: half images differ in size");
  }
  const BlockLayout l = block_layout(phase);
  const int hw = pair.first.width(), hh = pair.first.height();
  Plane out(2 * hw, 2 * hh);
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < hw; ++x) {
      const int r0 = 2 * y, c0 = 2 * x;
      out(r0 + l.r_row, c0 + l.r_col) =
          0.5 * (pair.first(kRed, y, x) + pair.second(kRed, y, x));
      out(r0 + l.b_row, c0 + l.b_col) =
          0.5 * (pair.first(kBlue, y, x) + pair.second(kBlue, y, x));
      out(r0 + l.g1_row, c0 + l.g1_col) = pair.first(kGreen, y, x);
      out(r0 + l.g2_row, c0 + l.g2_col) = pair.second(kGreen, y, x);
    }
  }
  return CfaImage(std::move(out), phase);
}

QuadPlanes pack_quad(const CfaImage& cfa) {
  const BlockLayout l = block_layout(cfa.phase());
  const int hw = cfa.width() / 2, hh = cfa.height() / 2;
  QuadPlanes q{Plane(hw, hh), Plane(hw, hh), Plane(hw, hh), Plane(hw, hh)};
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < hw; ++x) {
      q.r(y, x) = cfa(2 * y + l.r_row, 2 * x + l.r_col);
      q.g1(y, x) = cfa(2 * y + l.g1_row, 2 * x + l.g1_col);
      q.g2(y, x) = cfa(2 * y + l.g2_row, 2 * x + l.g2_col);
      q.b(y, x) = cfa(2 * y + l.b_row, 2 * x + l.b_col);
    }
  }
  return q;
}

CfaImage unpack_quad(const QuadPlanes& quad, CfaPhase phase) {
  if (!quad.r.same_shape(quad.g1) || !quad.r.same_shape(quad.g2) ||
      !quad.r.same_shape(quad.b)) {
    throw DimensionError("unpack_quad: planes differ in size");
  }
  const BlockLayout l = block_layout(phase);
  const int hw = quad.r.width(), hh = quad.r.height();
  Plane out(2 * hw, 2 * hh);
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < hw; ++x) {
      out(2 * y + l.r_row, 2 * x + l.r_col) = quad.r(y, x);
      out(2 * y + l.g1_row, 2 * x + l.g1_col) = quad.g1(y, x);
      out(2 * y + l.g2_row, 2 * x + l.g2_col) = quad.g2(y, x);
      out(2 * y + l.b_row, 2 * x + l.b_col) = quad.b(y, x);
    }
  }
  return CfaImage(std::move(out), phase);
}

void write_cfa(const std::filesystem::path& path, const CfaImage& cfa) {
  write_image(path, cfa.plane());
  std::filesystem::path meta = path;
  meta += ".meta";
  std::ofstream out(meta, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + meta.string() + "'");
  out << "phase=" << phase_name(cfa.phase()) << "\n";
  if (!out) throw IoError("error writing '" + meta.string() + "'");
}

CfaImage read_cfa(const std::filesystem::path& path) {
  GrayImage plane = read_gray_image(path);
  CfaPhase phase = CfaPhase::kRggb;
  std::filesystem::path meta = path;
  meta += ".meta";
  std::ifstream in(meta);
  if (in) {
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      if (line.substr(0, eq) == "phase") phase = parse_phase(line.substr(eq + 1));
    }
  }
  return CfaImage(std::move(plane), phase);
}

}  // namespace bayerpipe
