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

#ifndef BAYERPIPE_NOISE_HPP_
#define BAYERPIPE_NOISE_HPP_

#include <array>
#include <cstdint>
#include <optional>

#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"

namespace bayerpipe {

// One splitmix64 output for input x. Also the seed-derivation hash.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Per-image seed for dataset runs; independent of processing order.
inline std::uint64_t image_seed(std::uint64_t master_seed,
                                std::uint64_t image_index) noexcept {
  return splitmix64(master_seed ^ image_index);
}

// xoshiro256++ seeded through a splitmix64 expansion of a 64-bit seed.
// Single owner; not thread safe.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Standard normal by Box-Muller. Each pair of normals consumes exactly two
  // uniforms; the second of a pair is cached for the next call.
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> state_;
  std::optional<double> spare_;
};

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// out = in + sigma * z with z i.i.d. N(0,1), drawn in raster order and, for
// color images, channel by channel. Throws ParameterError if sigma < 0.
Plane add_awgn(const Plane& img, const NoiseSpec& spec);
ColorImage add_awgn(const ColorImage& img, const NoiseSpec& spec);
CfaImage add_awgn(const CfaImage& img, const NoiseSpec& spec);

// One Poisson draw with the given mean (inversion below 10, PTRS transformed
// rejection otherwise). Throws DomainError for a negative or non-finite mean.
std::int64_t poisson_draw(RngStream& rng, double mean);

// Every sample replaced by a Poisson draw with that sample as mean.
Plane poisson_sample(const Plane& img, std::uint64_t seed);
ColorImage poisson_sample(const ColorImage& img, std::uint64_t seed);
CfaImage poisson_sample(const CfaImage& img, std::uint64_t seed);

// Classical Anscombe pair: a(x) = 2 sqrt(x + 3/8) and the algebraic inverse
// a^-1(y) = (y/2)^2 - 1/8. Note a^-1(a(x)) = x + 1/4.
double anscombe(double x);
double anscombe_inverse(double y) noexcept;

// Throw DomainError when any sample is below -3/8.
Plane anscombe(const Plane& img);
ColorImage anscombe(const ColorImage& img);
CfaImage anscombe(const CfaImage& img);
Plane anscombe_inverse(const Plane& img);
ColorImage anscombe_inverse(const ColorImage& img);
CfaImage anscombe_inverse(const CfaImage& img);

}  // namespace bayerpipe

#endif  // BAYERPIPE_NOISE_HPP_
