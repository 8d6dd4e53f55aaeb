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

#ifndef BAYERPIPE_IMAGE_IO_HPP_
#define BAYERPIPE_IMAGE_IO_HPP_

#include <filesystem>
#include <string>
#include <variant>

#include "bayerpipe/image.hpp"

namespace bayerpipe {

// Supported on-disk formats:
//   P6 / P5  binary 8-bit PPM / PGM with maxval 255. Sample k reads as k.
//   PF / Pf  Portable FloatMap, 32-bit floats, rows stored bottom-to-top.
//            Written little-endian (scale -1.0); both endians are read.
enum class ImageFormat { kPpm, kPgm, kPfmColor, kPfmGray };

using AnyImage = std::variant<ColorImage, GrayImage>;

AnyImage read_image(const std::filesystem::path& path);
// Convenience wrappers; throw ParseError if the file holds the other kind.
ColorImage read_color_image(const std::filesystem::path& path);
GrayImage read_gray_image(const std::filesystem::path& path);

// Format chosen from the extension: .ppm, .pgm, .pfm.
void write_image(const std::filesystem::path& path, const ColorImage& img);
void write_image(const std::filesystem::path& path, const GrayImage& img);

// In-memory codecs behind the file functions.
AnyImage decode_image(const std::string& bytes);
std::string encode_image(const ColorImage& img, ImageFormat format);
std::string encode_image(const GrayImage& img, ImageFormat format);

// 8-bit export rule: clamp to [0, 255], round half away from zero.
unsigned char to_byte(double v) noexcept;

}  // namespace bayerpipe

#endif  // BAYERPIPE_IMAGE_IO_HPP_
