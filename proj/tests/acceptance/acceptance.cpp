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


// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Run a subset with e.g. `acceptance 3 4`.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bayerpipe/analysis.hpp"
#include "bayerpipe/cmaes.hpp"
#include "bayerpipe/dataset.hpp"
#include "bayerpipe/demosaic.hpp"
#include "bayerpipe/denoise.hpp"
#include "bayerpipe/image.hpp"
#include "bayerpipe/mosaic.hpp"
#include "bayerpipe/noise.hpp"
#include "bayerpipe/pipeline.hpp"
#include "bayerpipe/tune.hpp"
#include "cli.hpp"

namespace bayerpipe {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 7;
constexpr double kSigma = 20.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; the criterion passes only if all of them do.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

fs::path natural_dir() {
  return fs::path(BAYERPIPE_TEST_DATA_DIR) / "natural";
}

const std::vector<ColorImage>& natural_images() {
  static const std::vector<ColorImage> images = load_dataset(natural_dir()).images;
  return images;
}

ColorImage constant(int w, int h, double r, double g, double b) {
  return ColorImage(Plane(w, h, r), Plane(w, h, g), Plane(w, h, b));
}

ColorImage random_image(int w, int h, std::uint64_t seed) {
  RngStream rng(seed);
  ColorImage img(w, h);
  for (int c = 0; c < 3; ++c)
    for (double& v : img.channel(c).values()) v = 255.0 * rng.uniform();
  return img;
}

PipelineSpec ha_dct8() {
  PipelineSpec s;
  s.dn1 = DenoiserId::kDct8;
  s.dm = DemosaicerId::kHamiltonAdams;
  s.dn2 = DenoiserId::kDct8;
  return s;
}

PipelineSpec with_params(PipelineParams p) {
  PipelineSpec s = ha_dct8();
  s.params = p;
  return s;
}

// ---------------------------------------------------------------------------

void exactness(Outcome& o) {
  bool constants = true;
  for (CfaPhase phase : {CfaPhase::kRggb, CfaPhase::kGrbg, CfaPhase::kGbrg,
                         CfaPhase::kBggr}) {
    const ColorImage flat = constant(24, 16, 37.5, 128.25, 201.0);
    const CfaImage cfa = mosaick(flat, phase);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 24; ++j)
        constants = constants &&
                    cfa.plane()(i, j) == flat(cfa_channel(phase, i, j), i, j);
    for (DemosaicerId dm : {DemosaicerId::kBilinear, DemosaicerId::kHamiltonAdams,
                            DemosaicerId::kMalvar}) {
      constants = constants && demosaic(cfa, dm) == flat;
    }
  }
  o.check(constants, "constant mosaick/demosaic exact");

  const CfaImage v = mosaick(random_image(32, 24, 3), CfaPhase::kGbrg);
  DenoiseConfig cfg;
  cfg.sigma = 10;
  o.check(recombine_cfa(split_cfa(v), v.phase()) == v &&
              denoise_cfa(v, DenoiserId::kIdentity, cfg) == v,
          "split/recombine identity");

  bool presets = true;
  for (double s : {5.0, 20.0, 60.0}) {
    presets = presets && preset(Preset::kDnDm, s) == PipelineParams{1, 0, s, 0} &&
              preset(Preset::kDmDn, s) == PipelineParams{0, 1, 0, s} &&
              preset(Preset::kDm15Dn, s) == PipelineParams{0, 1, 0, 1.5 * s};
  }
  cfg.sigma = 15;
  const ColorImage dm = demosaic(v, DemosaicerId::kHamiltonAdams);
  presets = presets &&
            run_pipeline(v, with_params(preset(Preset::kDnDm, 15))) ==
                demosaic(denoise_cfa(v, DenoiserId::kDct8, cfg),
                         DemosaicerId::kHamiltonAdams) &&
            run_pipeline(v, with_params(preset(Preset::kDmDn, 15))) ==
                denoise_rgb(dm, DenoiserId::kDct8, cfg);
  cfg.sigma = 22.5;
  presets = presets && run_pipeline(v, with_params(preset(Preset::kDm15Dn, 15))) ==
                           denoise_rgb(dm, DenoiserId::kDct8, cfg);
  o.check(presets, "preset mappings and compositions");

  const PipelineParams ref{0.3, 0.9, 12, 31};
  o.check(generalize_by_sigma(ref, 20, 20) == ref &&
              generalize_by_image(v, 20, 20, ref, ha_dct8()) ==
                  run_pipeline(v, with_params(ref)),
          "generalization identities at sigma* = sigma_ref");

  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ColorImage a = random_image(17, 9, seed);
    ColorImage b = random_image(17, 9, seed + 100);
    long double sum = 0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < a.channel(c).size(); ++k) {
        const long double d = static_cast<long double>(a.channel(c).values()[k]) -
                              b.channel(c).values()[k];
        sum += d * d;
      }
    const long double m = sum / (3.0L * a.pixel_count());
    const double oracle = static_cast<double>(10.0L * std::log10(255.0L * 255.0L / m));
    worst = std::max(worst, std::abs(cpsnr(b, a) - oracle));
  }
  o.check(worst <= 1e-9 && std::isinf(cpsnr(dm, dm)),
          "CPSNR oracle max err " + fmt(worst, 3) + " dB");
}

void awgn_statistics(Outcome& o) {
  const ColorImage clean = constant(512, 512, 128, 128, 128);
  const ColorImage noisy = add_awgn(clean, {kSigma, kSeed});
  const NoiseStats st = noise_stats(residual(noisy, clean), StatsSpace::kRgb);
  const double var_lo = 0.97 * kSigma * kSigma, var_hi = 1.03 * kSigma * kSigma;
  bool var_ok = true;
  double max_lag = 0.0, max_cross = 0.0;
  for (int c = 0; c < 3; ++c) {
    var_ok = var_ok && st.variance[c] >= var_lo && st.variance[c] <= var_hi;
    for (int s = 0; s <= kMaxLag; ++s)
      for (int t = 0; t <= kMaxLag; ++t)
        if (s || t) max_lag = std::max(max_lag, std::abs(st.corr[c][s][t]));
    for (int d = 0; d < 3; ++d)
      if (d != c) max_cross = std::max(max_cross, std::abs(st.cross_corr[c][d]));
  }
  o.check(var_ok, "variances " + fmt(st.variance[0]) + "/" + fmt(st.variance[1]) +
                      "/" + fmt(st.variance[2]) + " in 400 +- 3%");
  o.check(max_lag <= 0.01, "max |lag rho| " + fmt(max_lag, 3) + " <= 0.01");
  o.check(max_cross <= 0.01, "max |cross rho| " + fmt(max_cross, 3) + " <= 0.01");
}

void demosaiced_noise(Outcome& o) {
  const auto& images = natural_images();
  const NoisyDataset data = make_noisy_dataset(images, kSigma, kSeed);
  std::vector<NoiseStats> opp, rgb;
  for (std::size_t k = 0; k < images.size(); ++k) {
    const Residual r = residual(demosaic(data.noisy[k], DemosaicerId::kHamiltonAdams),
                                data.truth[k]);
    opp.push_back(noise_stats(r, StatsSpace::kYc1c2));
    rgb.push_back(noise_stats(r, StatsSpace::kRgb));
  }
  const NoiseStats a = average_stats(opp), b = average_stats(rgb);
  const double s2 = kSigma * kSigma;
  const double y = a.variance[0] / s2, c1 = a.variance[1] / s2,
               c2 = a.variance[2] / s2, rho = b.corr[0][0][1];
  o.check(images.size() >= 5 && images[0].width() >= 256 && images[0].height() >= 256,
          std::to_string(images.size()) + " images");
  o.check(y >= 1.3 && y <= 2.2, "Var(Y)/s^2 " + fmt(y) + " in [1.3, 2.2]");
  o.check(c1 <= 0.8, "Var(C1)/s^2 " + fmt(c1) + " <= 0.8");
  o.check(c2 <= 0.5, "Var(C2)/s^2 " + fmt(c2) + " <= 0.5");
  o.check(rho >= 0.25, "R lag-(0,1) rho " + fmt(rho) + " >= 0.25");
}

void rmse_trend(Outcome& o) {
  const std::vector<double> sigmas{1, 3, 5, 10, 20, 40};
  const auto rows = rmse_table(natural_images(), DemosaicerId::kHamiltonAdams,
                               sigmas, kSeed);
  bool monotone = true;
  std::string trail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) monotone = monotone && rows[i].mean_rmse > rows[i - 1].mean_rmse;
    trail += (i ? "/" : "") + fmt(rows[i].mean_rmse);
  }
  const double ratio = rows.back().mean_rmse / 40.0;
  o.check(rows.front().mean_rmse >= 3.0,
          "RMSE(1) " + fmt(rows.front().mean_rmse) + " >= 3.0");
  o.check(ratio >= 0.70 && ratio <= 0.95,
          "RMSE(40)/40 " + fmt(ratio) + " in [0.70, 0.95]");
  o.check(monotone, "monotone " + trail);
}

void k_sweep(Outcome& o) {
  const auto& images = natural_images();
  const NoisyDataset data = make_noisy_dataset(images, kSigma, kSeed);
  std::vector<double> ks;
  for (int i = 0; i < 10; ++i) ks.push_back(1.0 + 0.1 * i);
  std::vector<double> mean(ks.size(), 0.0);
  for (std::size_t k = 0; k < images.size(); ++k) {
    const auto row = sweep_k(data.noisy[k], data.truth[k], DemosaicerId::kHamiltonAdams,
                             DenoiserId::kDct8, kSigma, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) mean[i] += row[i].cpsnr / images.size();
  }
  const std::size_t best = std::max_element(mean.begin(), mean.end()) - mean.begin();
  const double gain = mean[5] - mean[0];
  o.check(ks[best] >= 1.2 - 1e-12, "argmax k " + fmt(ks[best]) + " >= 1.2");
  o.check(gain >= 0.15, "CPSNR(1.5) - CPSNR(1.0) " + fmt(gain) + " dB >= 0.15");
}

void ordering(Outcome& o) {
  const NoisyDataset data = make_noisy_dataset(natural_images(), kSigma, kSeed);
  const double dndm = evaluate_pipeline(data, with_params(preset(Preset::kDnDm, kSigma))).mean;
  const double dmdn = evaluate_pipeline(data, with_params(preset(Preset::kDmDn, kSigma))).mean;
  const double dm15 =
      evaluate_pipeline(data, with_params(preset(Preset::kDm15Dn, kSigma))).mean;
  o.check(dm15 > dndm, "DM&1.5DN " + fmt(dm15, 5) + " > DN&DM " + fmt(dndm, 5));
  o.check(dm15 > dmdn, "DM&1.5DN > DM&DN " + fmt(dmdn, 5));
}

// CMA-ES maximizes; these wrap minimization problems.
double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += (v - 1.0) * (v - 1.0);
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i], b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

BoxBounds box(std::size_t n) {
  return {std::vector<double>(n, -5.0), std::vector<double>(n, 5.0)};
}

void cmaes_sanity(Outcome& o) {
  CmaConfig cfg;
  cfg.seed = kSeed;
  cfg.stagnation_tolerance = 0.0;

  cfg.max_evaluations = 20000;
  const TuneResult s = cmaes_maximize([](auto x) { return -sphere(x); }, box(10), cfg);
  o.check(-s.best_value < 1e-10 && s.evaluations <= 20000,
          "10-D sphere " + fmt(-s.best_value, 3) + " in " + std::to_string(s.evaluations));

  cfg.max_evaluations = 60000;
  const TuneResult r =
      cmaes_maximize([](auto x) { return -rosenbrock(x); }, box(6), cfg);
  o.check(-r.best_value < 1e-6 && r.evaluations <= 60000,
          "6-D Rosenbrock " + fmt(-r.best_value, 3) + " in " +
              std::to_string(r.evaluations));

  CmaConfig short_cfg = cfg;
  short_cfg.max_evaluations = 1500;
  auto record = [&](const Objective& f, int jobs) {
    std::vector<std::vector<double>> seq;
    CmaConfig c = short_cfg;
    c.jobs = jobs;
    const TuneResult res = cmaes_maximize(f, box(8), c, [&](std::span<const double> x) {
      seq.emplace_back(x.begin(), x.end());
    });
    return std::make_pair(seq, res.best_params);
  };
  const Objective f = [](auto x) { return -sphere(x); };
  const Objective g = [](auto x) { return std::exp(-sphere(x)); };
  const auto base = record(f, 1);
  o.check(!base.first.empty() && record(g, 1).first == base.first,
          "monotone-transform invariance");
  o.check(record(f, 1) == base && record(f, 3) == base, "deterministic per seed");
}

void tuning(Outcome& o) {
  std::vector<ColorImage> crops;
  for (std::size_t k = 0; k < 3; ++k)
    crops.push_back(center_crop(natural_images()[k], 128, 128));
  const NoisyDataset data = make_noisy_dataset(crops, kSigma, kSeed);

  CmaConfig cfg;
  cfg.seed = kSeed;
  cfg.max_evaluations = 3000;
  const TuneResult r = tune_pipeline(data, ha_dct8(), cfg);
  const PipelineParams best = params_from_vector(r.best_params);
  const double tuned = evaluate_pipeline(data, with_params(best)).mean;

  double best_preset = -INFINITY;
  for (Preset p : {Preset::kDnDm, Preset::kDmDn, Preset::kDm15Dn})
    best_preset = std::max(best_preset,
                           evaluate_pipeline(data, with_params(preset(p, kSigma))).mean);

  double grid = -INFINITY;
  PipelineParams grid_at;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int s1 = 0; s1 <= 8; ++s1)
        for (int s2 = 0; s2 <= 8; ++s2) {
          const PipelineParams p{0.25 * a, 0.25 * b, 5.0 * s1, 5.0 * s2};
          const double v = evaluate_pipeline(data, with_params(p)).mean;
          if (v > grid) {
            grid = v;
            grid_at = p;
          }
        }

  o.check(r.evaluations <= 3000, std::to_string(r.evaluations) + " evaluations");
  o.check(best.beta >= 0.8, "beta " + fmt(best.beta) + " >= 0.8");
  o.check(best.sigma2 >= kSigma, "sigma2 " + fmt(best.sigma2) + " >= 20");
  o.check(tuned >= best_preset - 0.05,
          "tuned " + fmt(tuned, 6) + " >= best preset " + fmt(best_preset, 6) + " - 0.05");
  o.check(tuned >= grid - 0.1,
          "tuned >= grid " + fmt(grid, 6) + " (at " + fmt(grid_at.alpha) + "," +
              fmt(grid_at.beta) + "," + fmt(grid_at.sigma1) + "," +
              fmt(grid_at.sigma2) + ") - 0.1");
}

void vst(Outcome& o) {
  for (double lambda : {5.0, 10.0, 30.0, 100.0}) {
    RngStream rng(image_seed(kSeed, static_cast<std::uint64_t>(lambda)));
    double sum = 0, sq = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double a = anscombe(static_cast<double>(poisson_draw(rng, lambda)));
      sum += a;
      sq += a * a;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
    o.check(sd >= 0.9 && sd <= 1.1, "lambda " + fmt(lambda) + " std " + fmt(sd));
  }
  // Bit-exact where x + 3/8 is a dyadic square, so no step rounds.
  bool exact = true;
  for (double x : {-0.125, 0.625, 1.875, 3.625, 5.875, 99.625, 65535.625})
    exact = exact && anscombe_inverse(anscombe(x)) == x + 0.25;
  // Elsewhere sqrt and the square each round once.
  double worst_ulp = 0;
  for (int k = 0; k <= 100000; ++k) {
    const double x = k, want = x + 0.25;
    const double ulp = std::nextafter(want, INFINITY) - want;
    worst_ulp = std::max(worst_ulp, std::abs(anscombe_inverse(anscombe(x)) - want) / ulp);
  }
  o.check(exact, "round trip x + 1/4 exact on dyadic squares");
  o.check(worst_ulp <= 2, "integer counts within " + fmt(worst_ulp) + " ulp");
}

void reproducibility(Outcome& o) {
  const fs::path dir = fs::temp_directory_path() / "bayerpipe_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = natural_dir().string();
  const std::vector<std::vector<std::string>> runs = {
      {"pipeline", "run", "--dataset", data, "--sigma", "20", "--seed", "7",
       "--preset", "dm15dn", "--out", (dir / "run").string()},
      {"pipeline", "run", "--dataset", data, "--sigma", "30", "--seed", "9",
       "--model", "poisson", "--alpha", "0.3", "--beta", "0.8", "--sigma1",
       "0.5", "--sigma2", "1.2",
       "--dn1", "nlmeans", "--dm", "malvar", "--vst", "--center-crop", "96", "--out",
       (dir / "run2").string()},
      {"tune", "--dataset", data, "--center-crop", "64", "--sigma", "20", "--seed", "7",
       "--max-evals", "150", "--out", (dir / "tune").string()},
      {"stats", "--dataset", data, "--seed", "7", "--out", (dir / "stats").string()},
      {"rmse-table", "--dataset", data, "--seed", "7", "--out",
       (dir / "rmse").string()},
      {"pipeline", "sweep-k", "--dataset", data, "--center-crop", "128", "--sigma", "20",
       "--seed", "7", "--out", (dir / "sweep").string()},
      {"eval", "--dataset", data, "--center-crop", "64", "--sigmas", "10,40", "--seed", "7",
       "--out", (dir / "eval").string()},
  };
  int reproduced = 0;
  for (const auto& args : runs) {
    std::ostringstream out, err;
    if (cli::run(args, out, err) != cli::kExitOk) {
      o.check(false, args[0] + " failed: " + err.str());
      continue;
    }
    const fs::path manifest = fs::path(args.back()) / "manifest.json";
    std::ostringstream rout, rerr;
    const int code = cli::run({"replay", "--manifest", manifest.string(), "--scratch",
                               (dir / "scratch").string()},
                              rout, rerr);
    if (code == cli::kExitOk) {
      ++reproduced;
    } else {
      o.check(false, manifest.string() + " exit " + std::to_string(code));
    }
  }
  o.check(reproduced == static_cast<int>(runs.size()),
          std::to_string(reproduced) + "/" + std::to_string(runs.size()) +
              " manifests reproduced bit-exactly");
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: none
  std::function<void(Outcome&)> body;
};

}  // namespace
}  // namespace bayerpipe

int main(int argc, char** argv) {
  using namespace bayerpipe;
  const std::vector<Criterion> all = {
      {1, "exactness suite", 1.0, exactness},
      {2, "AWGN statistics", 10.0, awgn_statistics},
      {3, "demosaiced-noise structure", 0.0, demosaiced_noise},
      {4, "RMSE trend", 0.0, rmse_trend},
      {5, "k-sweep", 300.0, k_sweep},
      {6, "preset ordering", 0.0, ordering},
      {7, "CMA-ES sanity", 60.0, cmaes_sanity},
      {8, "pipeline tuning", 1800.0, tuning},
      {9, "VST", 0.0, vst},
      {10, "reproducibility", 0.0, reproducibility},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0) {
      o.check(secs <= c.budget_seconds,
              "runtime " + fmt(secs, 3) + " s <= " + fmt(c.budget_seconds) + " s");
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %-28s %s  %s(%.2f s)\n", c.id, c.name,
                o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
