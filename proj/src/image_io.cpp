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

#include "bayerpipe/image_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <locale>
#include <sstream>

#include "bayerpipe/error.hpp"

namespace bayerpipe {
namespace {

// Cursor over the ASCII header of a netpbm-style file.
class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, std::size_t start)
      : bytes_(bytes), pos_(start) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long long value = 0;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw ParseError(std::string(what) + " is too large", start);
      }
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
    return static_cast<int>(value);
  }

  double read_real(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() &&
           !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    const std::string token = bytes_.substr(start, pos_ - start);
    if (token.empty()) throw ParseError(std::string("expected ") + what, start);
    std::istringstream in(token);
    in.imbue(std::locale::classic());
    double value = 0.0;
    in >> value;
    if (in.fail() || !in.eof() || !std::isfinite(value)) {
      throw ParseError(std::string("malformed ") + what + " '" + token + "'",
                       start);
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void expect_single_space() {
    if (pos_ >= bytes_.size() ||
        !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError("expected single whitespace before raster", pos_);
    }
    ++pos_;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_;
};

struct Header {
  int width = 0;
  int height = 0;
  std::size_t raster_start = 0;
};

Header read_dims(HeaderReader& r) {
  Header h;
  r.skip_space_and_comments();
  const std::size_t at = r.pos();
  h.width = r.read_int("width");
  h.height = r.read_int("height");
  if (h.width <= 0 || h.height <= 0) {
    throw ParseError("image dimensions must be positive", at);
  }
  return h;
}

void check_payload(const std::string& bytes, std::size_t start,
                   std::size_t needed) {
  const std::size_t have = bytes.size() - start;
  if (have < needed) {
    throw ParseError("truncated payload: need " + std::to_string(needed) +
                         " bytes, have " + std::to_string(have),
                     bytes.size());
  }
}

AnyImage decode_netpbm(const std::string& bytes, int channels) {
  HeaderReader r(bytes, 2);
  Header h = read_dims(r);
  r.skip_space_and_comments();
  const std::size_t maxval_at = r.pos();
  const int maxval = r.read_int("maxval");
  if (maxval != 255) {
    throw ParseError("unsupported maxval " + std::to_string(maxval) +
                         " (only 255 is supported)",
                     maxval_at);
  }
  r.expect_single_space();
  h.raster_start = r.pos();

  const std::size_t count =
      static_cast<std::size_t>(h.width) * h.height * channels;
  check_payload(bytes, h.raster_start, count);
  const auto* raster =
      reinterpret_cast<const unsigned char*>(bytes.data() + h.raster_start);

  if (channels == 1) {
    Plane out(h.width, h.height);
    auto v = out.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = raster[k];
    return out;
  }
  ColorImage out(h.width, h.height);
  const std::size_t n = out.pixel_count();
  for (int c = 0; c < 3; ++c) {
    auto v = out.channel(c).values();
    for (std::size_t k = 0; k < n; ++k) v[k] = raster[3 * k + c];
  }
  return out;
}

float load_float(const char* p, bool little_endian) {
  std::uint32_t bits;
  std::memcpy(&bits, p, sizeof bits);
  const bool host_little = std::endian::native == std::endian::little;
  if (little_endian != host_little) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

void store_float_le(std::string& out, float f) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.append(buf, 4);
}

AnyImage decode_pfm(const std::string& bytes, int channels) {
  HeaderReader r(bytes, 2);
  Header h = read_dims(r);
  r.skip_space_and_comments();
  const std::size_t scale_at = r.pos();
  const double scale = r.read_real("scale");
  if (scale == 0.0) throw ParseError("PFM scale must be nonzero", scale_at);
  r.expect_single_space();
  h.raster_start = r.pos();
  const bool little = scale < 0.0;

  const std::size_t count =
      static_cast<std::size_t>(h.width) * h.height * channels;
  check_payload(bytes, h.raster_start, count * 4);
  const char* raster = bytes.data() + h.raster_start;

  auto sample = [&](int file_row, int col, int c) {
    const std::size_t idx =
        (static_cast<std::size_t>(file_row) * h.width + col) * channels + c;
    const float f = load_float(raster + 4 * idx, little);
    if (!std::isfinite(f)) {
      throw ParseError("non-finite sample", h.raster_start + 4 * idx);
    }
    return static_cast<double>(f);
  };

  if (channels == 1) {
    Plane out(h.width, h.height);
    for (int row = 0; row < h.height; ++row)
      for (int col = 0; col < h.width; ++col)
        out(row, col) = sample(h.height - 1 - row, col, 0);
    return out;
  }
  ColorImage out(h.width, h.height);
  for (int row = 0; row < h.height; ++row)
    for (int col = 0; col < h.width; ++col)
      for (int c = 0; c < 3; ++c)
        out(c, row, col) = sample(h.height - 1 - row, col, c);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string netpbm_header(const char* magic, int w, int h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " +
         std::to_string(h) + "\n255\n";
}

std::string pfm_header(const char* magic, int w, int h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " +
         std::to_string(h) + "\n-1.0\n";
}

ImageFormat format_for(const std::filesystem::path& path, bool color) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".pfm") return color ? ImageFormat::kPfmColor : ImageFormat::kPfmGray;
  if (ext == ".ppm" && color) return ImageFormat::kPpm;
  if (ext == ".pgm" && !color) return ImageFormat::kPgm;
  throw IoError("cannot write a " + std::string(color ? "color" : "gray") +
                " image to '" + path.string() +
                "': use ." + (color ? "ppm" : "pgm") + " or .pfm");
}

}  // namespace

unsigned char to_byte(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<unsigned char>(std::round(v));
}

AnyImage decode_image(const std::string& bytes) {
  if (bytes.size() < 2) throw ParseError("file too short for a header", 0);
  const std::string magic = bytes.substr(0, 2);
  if (magic == "P6") return decode_netpbm(bytes, 3);
  if (magic == "P5") return decode_netpbm(bytes, 1);
  if (magic == "PF") return decode_pfm(bytes, 3);
  if (magic == "Pf") return decode_pfm(bytes, 1);
  throw ParseError("unknown magic '" + magic + "'", 0);
}

std::string encode_image(const ColorImage& img, ImageFormat format) {
  const int w = img.width(), h = img.height();
  std::string out;
  if (format == ImageFormat::kPpm) {
    out = netpbm_header("P6", w, h);
    out.reserve(out.size() + img.pixel_count() * 3);
    for (int row = 0; row < h; ++row)
      for (int col = 0; col < w; ++col)
        for (int c = 0; c < 3; ++c)
          out.push_back(static_cast<char>(to_byte(img(c, row, col))));
    return out;
  }
  if (format == ImageFormat::kPfmColor) {
    out = pfm_header("PF", w, h);
    out.reserve(out.size() + img.pixel_count() * 12);
    for (int row = h - 1; row >= 0; --row)
      for (int col = 0; col < w; ++col)
        for (int c = 0; c < 3; ++c)
          store_float_le(out, static_cast<float>(img(c, row, col)));
    return out;
  }
  throw ParameterError("format cannot hold a color image");
}

std::string encode_image(const GrayImage& img, ImageFormat format) {
  const int w = img.width(), h = img.height();
  std::string out;
  if (format == ImageFormat::kPgm) {
    out = netpbm_header("P5", w, h);
    for (double v : img.values()) out.push_back(static_cast<char>(to_byte(v)));
    return out;
  }
  if (format == ImageFormat::kPfmGray) {
    out = pfm_header("Pf", w, h);
    out.reserve(out.size() + img.size() * 4);
    for (int row = h - 1; row >= 0; --row)
      for (int col = 0; col < w; ++col)
        store_float_le(out, static_cast<float>(img(row, col)));
    return out;
  }
  throw ParameterError("format cannot hold a gray image");
}

AnyImage read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.reason(), e.offset());
  }
}

ColorImage read_color_image(const std::filesystem::path& path) {
  AnyImage img = read_image(path);
  if (auto* c = std::get_if<ColorImage>(&img)) return std::move(*c);
  throw ParseError(path.string() + ": expected a color image, found gray", 0);
}

GrayImage read_gray_image(const std::filesystem::path& path) {
  AnyImage img = read_image(path);
  if (auto* g = std::get_if<GrayImage>(&img)) return std::move(*g);
  throw ParseError(path.string() + ": expected a gray image, found color", 0);
}

void write_image(const std::filesystem::path& path, const ColorImage& img) {
  write_file(path, encode_image(img, format_for(path, true)));
}

void write_image(const std::filesystem::path& path, const GrayImage& img) {
  write_file(path, encode_image(img, format_for(path, false)));
}

}  // namespace bayerpipe
