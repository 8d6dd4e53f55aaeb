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

#include "bayerpipe/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "bayerpipe/error.hpp"

namespace bayerpipe {
namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

void require_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("noise sigma must be a finite value >= 0, got " +
                         std::to_string(sigma));
  }
}

void add_noise_in_place(Plane& plane, double sigma, RngStream& rng) {
  for (double& v : plane.values()) v += sigma * rng.normal();
}

void poisson_in_place(Plane& plane, RngStream& rng) {
  for (double& v : plane.values()) v = static_cast<double>(poisson_draw(rng, v));
}

// Poisson by sequential CDF inversion; suitable for small means.
std::int64_t poisson_inversion(RngStream& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;  // tail underflow
    cdf = next;
  }
  return k;
}

// Hormann's PTRS transformed rejection, valid for mean >= 10.
std::int64_t poisson_ptrs(RngStream& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

template <typename F>
Plane map_plane(const Plane& img, F f) {
  Plane out = img;
  for (double& v : out.values()) v = f(v);
  return out;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) noexcept {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    word = splitmix64(s);
    s += kGoldenGamma;
  }
}

std::uint64_t RngStream::next() noexcept {
  auto& s = state_;
  const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Plane add_awgn(const Plane& img, const NoiseSpec& spec) {
  require_sigma(spec.sigma);
  if (spec.sigma == 0.0) return img;
  RngStream rng(spec.seed);
  Plane out = img;
  add_noise_in_place(out, spec.sigma, rng);
  return out;
}

ColorImage add_awgn(const ColorImage& img, const NoiseSpec& spec) {
  require_sigma(spec.sigma);
  if (spec.sigma == 0.0) return img;
  RngStream rng(spec.seed);
  ColorImage out = img;
  for (int c = 0; c < 3; ++c) add_noise_in_place(out.channel(c), spec.sigma, rng);
  return out;
}

CfaImage add_awgn(const CfaImage& img, const NoiseSpec& spec) {
  return CfaImage(add_awgn(img.plane(), spec), img.phase());
}

std::int64_t poisson_draw(RngStream& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("Poisson mean must be finite and >= 0, got " +
                      std::to_string(mean));
  }
  if (mean == 0.0) return 0;
  return mean < 10.0 ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

Plane poisson_sample(const Plane& img, std::uint64_t seed) {
  RngStream rng(seed);
  Plane out = img;
  poisson_in_place(out, rng);
  return out;
}

ColorImage poisson_sample(const ColorImage& img, std::uint64_t seed) {
  RngStream rng(seed);
  ColorImage out = img;
  for (int c = 0; c < 3; ++c) poisson_in_place(out.channel(c), rng);
  return out;
}

CfaImage poisson_sample(const CfaImage& img, std::uint64_t seed) {
  return CfaImage(poisson_sample(img.plane(), seed), img.phase());
}

double anscombe(double x) {
  if (!(x >= -0.375)) {
    throw DomainError("Anscombe transform needs x >= -3/8, got " +
                      std::to_string(x));
  }
  return 2.0 * std::sqrt(x + 0.375);
}

double anscombe_inverse(double y) noexcept {
  const double half = 0.5 * y;
  return half * half - 0.125;
}

Plane anscombe(const Plane& img) {
  return map_plane(img, [](double v) { return anscombe(v); });
}

ColorImage anscombe(const ColorImage& img) {
  return ColorImage(anscombe(img.channel(0)), anscombe(img.channel(1)),
                    anscombe(img.channel(2)));
}

CfaImage anscombe(const CfaImage& img) {
  return CfaImage(anscombe(img.plane()), img.phase());
}

Plane anscombe_inverse(const Plane& img) {
  return map_plane(img, [](double v) { return anscombe_inverse(v); });
}

ColorImage anscombe_inverse(const ColorImage& img) {
  return ColorImage(anscombe_inverse(img.channel(0)),
                    anscombe_inverse(img.channel(1)),
                    anscombe_inverse(img.channel(2)));
}

CfaImage anscombe_inverse(const CfaImage& img) {
  return CfaImage(anscombe_inverse(img.plane()), img.phase());
}

}  // namespace bayerpipe
