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

#include "bayerpipe/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <string>

#include "bayerpipe/analysis.hpp"
#include "bayerpipe/error.hpp"
#include "bayerpipe/noise.hpp"

namespace bayerpipe {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParameterError(std::string(name) + " must lie in [0, 1], got " +
                         std::to_string(v));
  }
}

void check_sigma(double v, const char* name) {
  if (!(v >= 0.0 && v <= 255.0)) {
    throw ParameterError(std::string(name) + " must lie in [0, 255], got " +
                         std::to_string(v));
  }
}

}  // namespace

void PipelineParams::validate() const {
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  check_sigma(sigma1, "sigma1");
  check_sigma(sigma2, "sigma2");
}

ColorImage run_pipeline(const CfaImage& v, const PipelineSpec& spec,
                        StageTimings* timings) {
  const PipelineParams& p = spec.params;
  p.validate();
  spec.denoiser.validate();

  const CfaImage input = spec.vst ? anscombe(v) : v;

  CfaImage blended = input;
  if (p.alpha != 0.0) {
    DenoiseConfig cfg = spec.denoiser;
    cfg.sigma = p.sigma1;
    const auto t0 = Clock::now();
    const CfaImage denoised = denoise_cfa(input, spec.dn1, cfg);
    if (timings) timings->denoise_seconds += seconds_since(t0);
    blended = CfaImage(
        blend(denoised.plane(), p.alpha, input.plane(), 1.0 - p.alpha),
        input.phase());
  }

  const auto t1 = Clock::now();
  ColorImage out = demosaic(blended, spec.dm);
  if (timings) timings->demosaic_seconds += seconds_since(t1);

  if (p.beta != 0.0) {
    DenoiseConfig cfg = spec.denoiser;
    cfg.sigma = p.sigma2;
    const auto t2 = Clock::now();
    const ColorImage denoised = denoise_rgb(out, spec.dn2, cfg);
    if (timings) timings->denoise_seconds += seconds_since(t2);
    out = blend(denoised, p.beta, out, 1.0 - p.beta);
  }

  return spec.vst ? anscombe_inverse(out) : out;
}

std::string_view preset_name(Preset p) noexcept {
  switch (p) {
    case Preset::kDnDm: return "DN&DM";
    case Preset::kDmDn: return "DM&DN";
    case Preset::kDm15Dn: return "DM&1.5DN";
  }
  return "DM&DN";
}

Preset parse_preset(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '&' || c == '_' || c == '-' || c == '.') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "dndm") return Preset::kDnDm;
  if (key == "dmdn") return Preset::kDmDn;
  if (key == "dm15dn") return Preset::kDm15Dn;
  throw ParameterError("unknown preset '" + std::string(name) +
                       "' (expected dndm, dmdn or dm15dn)");
}

PipelineParams preset(Preset p, double sigma) {
  if (!(sigma >= 0.0)) throw ParameterError("preset: sigma must be >= 0");
  switch (p) {
    case Preset::kDnDm: return {1.0, 0.0, sigma, 0.0};
    case Preset::kDmDn: return {0.0, 1.0, 0.0, sigma};
    case Preset::kDm15Dn: return {0.0, 1.0, 0.0, 1.5 * sigma};
  }
  throw ParameterError("unknown preset");
}

std::vector<KScore> sweep_k(const CfaImage& v, const ColorImage& truth,
                            DemosaicerId dm, DenoiserId dn, double sigma,
                            std::span<const double> k_list,
                            const DenoiseConfig& denoiser) {
  if (k_list.empty()) throw ParameterError("sweep_k: empty k list");
  if (!(sigma >= 0.0)) throw ParameterError("sweep_k: sigma must be >= 0");
  const ColorImage demosaiced = demosaic(v, dm);
  std::vector<KScore> scores;
  scores.reserve(k_list.size());
  for (double k : k_list) {
    if (!(k >= 0.0)) throw ParameterError("sweep_k: k must be >= 0");
    DenoiseConfig cfg = denoiser;
    cfg.sigma = k * sigma;
    scores.push_back({k, cpsnr(denoise_rgb(demosaiced, dn, cfg), truth)});
  }
  return scores;
}

ColorImage generalize_by_image(const CfaImage& v, double sigma_star,
                               double sigma_ref,
                               const PipelineParams& params_ref,
                               const PipelineSpec& spec) {
  if (!(sigma_star > 0.0) || !(sigma_ref > 0.0)) {
    throw ParameterError("generalize_by_image: sigmas must be > 0");
  }
  const double factor = sigma_ref / sigma_star;
  PipelineSpec ref = spec;
  ref.params = params_ref;
  const CfaImage moved(scaled(v.plane(), factor), v.phase());
  ColorImage out = run_pipeline(moved, ref);
  for (int c = 0; c < 3; ++c)
    for (double& x : out.channel(c).values()) x /= factor;
  return out;
}

PipelineParams generalize_by_sigma(const PipelineParams& params_ref,
                                   double sigma_ref, double sigma_star) {
  if (!(sigma_ref > 0.0)) {
    throw ParameterError("generalize_by_sigma: sigma_ref must be > 0");
  }
  if (!(sigma_star >= 0.0)) {
    throw ParameterError("generalize_by_sigma: sigma_star must be >= 0");
  }
  const double ratio = sigma_star / sigma_ref;
  PipelineParams out = params_ref;
  out.sigma1 = std::clamp(params_ref.sigma1 * ratio, 0.0, 255.0);
  out.sigma2 = std::clamp(params_ref.sigma2 * ratio, 0.0, 255.0);
  return out;
}

}  // namespace bayerpipe
