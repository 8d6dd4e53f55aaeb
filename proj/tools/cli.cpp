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


#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bayerpipe/analysis.hpp"
#include "bayerpipe/cmaes.hpp"
#include "bayerpipe/dataset.hpp"
#include "bayerpipe/demosaic.hpp"
#include "bayerpipe/denoise.hpp"
#include "bayerpipe/error.hpp"
#include "bayerpipe/image.hpp"
#include "bayerpipe/image_io.hpp"
#include "bayerpipe/mosaic.hpp"
#include "bayerpipe/noise.hpp"
#include "bayerpipe/pipeline.hpp"
#include "bayerpipe/tune.hpp"
#include "json.hpp"

namespace bayerpipe::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kManifestName = "manifest.json";

// JSON has no infinities; they are spelled as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
  json* capture = nullptr;  // receives the manifest (used by replay)
};

json new_manifest(const Context& ctx, const std::string& subcommand) {
  json m;
  m["tool"] = "bayerpipe";
  m["argv"] = ctx.args;
  m["cwd"] = fs::current_path().string();
  m["subcommand"] = subcommand;
  m["config"] = json::object();
  m["components"] = json::object();
  m["master_seed"] = nullptr;
  m["image_seeds"] = json::array();
  m["images"] = json::array();
  m["aggregate"] = json::object();
  m["timings"] = json::object();
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void set_timings(json& m, const StageTimings& t, Clock::time_point start) {
  m["timings"]["demosaic_seconds"] = t.demosaic_seconds;
  m["timings"]["denoise_seconds"] = t.denoise_seconds;
  m["timings"]["total_seconds"] =
      std::chrono::duration<double>(Clock::now() - start).count();
}

void emit_manifest(Context& ctx, const json& m, const fs::path& path) {
  write_text(path, m.dump(2) + "\n");
  if (ctx.capture) *ctx.capture = m;
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) {
    throw IoError("cannot create output directory '" + dir + "'");
  }
  return p;
}

fs::path sidecar_manifest(const std::string& out_file) {
  return fs::path(out_file + ".manifest.json");
}

// Runs f(k) for k in [0, n) on up to `jobs` threads. Each index is handled
// by exactly one thread, so results stored per index are order-independent.
template <typename F>
void parallel_for(std::size_t n, int jobs, F f) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) f(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n; k += workers) f(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double mean_sample(const Plane& p) {
  double s = 0.0;
  for (double v : p.values()) s += v;
  return s / static_cast<double>(p.size());
}

double mean_sample(const ColorImage& img) {
  return (mean_sample(img.channel(0)) + mean_sample(img.channel(1)) +
          mean_sample(img.channel(2))) /
         3.0;
}

// ---------------------------------------------------------------------------
// Option groups

struct DatasetOptions {
  std::string dir;
  int crop = 0;
  int limit = 0;
  std::string phase = "RGGB";

  void add(CLI::App* app) {
    app->add_option("--dataset", dir, "Directory of .ppm/.pfm ground truths")
        ->required();
    app->add_option("--center-crop", crop, "Use the centered N x N crop of each image");
    app->add_option("--limit", limit, "Use only the first N images");
    app->add_option("--phase", phase, "Bayer phase (RGGB, GRBG, GBRG, BGGR)");
  }

  Dataset load() const {
    Dataset ds = load_dataset(dir);
    if (limit < 0) throw ParameterError("--limit must be >= 0");
    if (limit > 0 && static_cast<std::size_t>(limit) < ds.images.size()) {
      ds.images.resize(limit);
      ds.paths.resize(limit);
    }
    if (crop < 0) throw ParameterError("--center-crop must be >= 0");
    if (crop > 0)
      for (ColorImage& img : ds.images) img = center_crop(img, crop, crop);
    return ds;
  }

  void record(json& m) const {
    m["config"]["dataset"] = dir;
    m["config"]["center_crop"] = crop;
    m["config"]["limit"] = limit;
    m["config"]["phase"] = phase;
  }
};

struct ComponentOptions {
  std::string dn1 = "dct8";
  std::string dm = "ha";
  std::string dn2 = "dct8";
  bool vst = false;

  void add(CLI::App* app) {
    app->add_option("--dn1", dn1, "CFA denoiser (identity, dct8, nlmeans)");
    app->add_option("--dm", dm, "Demosaicer (bilinear, ha, malvar)");
    app->add_option("--dn2", dn2, "Color denoiser (identity, dct8, nlmeans)");
    app->add_flag("--vst", vst, "Anscombe transform before, inverse after");
  }

  PipelineSpec spec() const {
    PipelineSpec s;
    s.dn1 = parse_denoiser(dn1);
    s.dm = parse_demosaicer(dm);
    s.dn2 = parse_denoiser(dn2);
    s.vst = vst;
    return s;
  }

  void record(json& m) const {
    const PipelineSpec s = spec();
    m["components"]["dn1"] = denoiser_name(s.dn1);
    m["components"]["dm"] = demosaicer_name(s.dm);
    m["components"]["dn2"] = denoiser_name(s.dn2);
    m["components"]["vst"] = vst;
  }
};

json params_json(const PipelineParams& p) {
  return json{{"alpha", p.alpha},
              {"beta", p.beta},
              {"sigma1", p.sigma1},
              {"sigma2", p.sigma2}};
}

void record_seeds(json& m, std::uint64_t master, const NoisyDataset& data) {
  m["master_seed"] = master;
  m["image_seeds"] = data.seeds;
}

void record_images(json& m, const Dataset& ds) {
  for (std::size_t k = 0; k < ds.paths.size(); ++k) {
    if (m["images"].size() <= k) {
      m["images"].push_back(json{{"path", ds.paths[k].string()},
                                 {"metrics", json::object()}});
    }
  }
}

// AWGN goes through make_noisy_dataset; Poisson draws each mosaic sample
// with that sample as mean (sigma is then only recorded).
NoisyDataset noisy_dataset(const Dataset& ds, const std::string& model,
                           double sigma, std::uint64_t seed, CfaPhase phase) {
  if (model == "awgn") return make_noisy_dataset(ds.images, sigma, seed, phase);
  if (model != "poisson") {
    throw ParameterError("unknown noise model '" + model +
                         "' (expected awgn or poisson)");
  }
  NoisyDataset data;
  data.truth = ds.images;
  data.sigma = sigma;
  for (std::size_t k = 0; k < ds.images.size(); ++k) {
    data.seeds.push_back(image_seed(seed, k));
    data.noisy.push_back(poisson_sample(mosaick(ds.images[k], phase), data.seeds.back()));
  }
  return data;
}

// Mean CPSNR of one pipeline over a noisy dataset, images in parallel.
DatasetScore score_dataset(const NoisyDataset& data, const PipelineSpec& spec,
                           int jobs, StageTimings& total) {
  const std::size_t n = data.noisy.size();
  DatasetScore score;
  score.per_image.assign(n, 0.0);
  std::vector<StageTimings> timings(n);
  parallel_for(n, jobs, [&](std::size_t k) {
    score.per_image[k] =
        cpsnr(run_pipeline(data.noisy[k], spec, &timings[k]), data.truth[k]);
  });
  for (const StageTimings& t : timings) {
    total.demosaic_seconds += t.demosaic_seconds;
    total.denoise_seconds += t.denoise_seconds;
  }
  score.mean = mean_of(score.per_image);
  return score;
}

// ---------------------------------------------------------------------------
// Single-file commands

struct MosaicCmd {
  std::string in, out, phase = "RGGB";
};

int do_mosaic(Context& ctx, const MosaicCmd& o) {
  const auto start = Clock::now();
  const CfaImage cfa = mosaick(read_color_image(o.in), parse_phase(o.phase));
  write_cfa(o.out, cfa);
  json m = new_manifest(ctx, "mosaic");
  m["config"] = {{"in", o.in}, {"out", o.out}, {"phase", phase_name(cfa.phase())}};
  m["aggregate"]["mean"] = number(mean_sample(cfa.plane()));
  set_timings(m, {}, start);
  emit_manifest(ctx, m, sidecar_manifest(o.out));
  return kExitOk;
}

struct NoiseCmd {
  std::string in, out, model = "awgn";
  double sigma = 0.0;
  std::uint64_t seed = 0;
  bool cfa = false;
};

int do_noise(Context& ctx, const NoiseCmd& o) {
  const auto start = Clock::now();
  json m = new_manifest(ctx, "noise");
  m["config"] = {{"in", o.in}, {"out", o.out}, {"model", o.model},
                 {"sigma", o.sigma}, {"cfa", o.cfa}};
  m["master_seed"] = o.seed;
  const bool poisson = o.model == "poisson";
  if (!poisson && o.model != "awgn") {
    throw ParameterError("unknown noise model '" + o.model +
                         "' (expected awgn or poisson)");
  }
  double mean = 0.0;
  if (o.cfa) {
    const CfaImage in = read_cfa(o.in);
    const CfaImage out =
        poisson ? poisson_sample(in, o.seed) : add_awgn(in, {o.sigma, o.seed});
    write_cfa(o.out, out);
    mean = mean_sample(out.plane());
  } else {
    AnyImage img = read_image(o.in);
    if (auto* c = std::get_if<ColorImage>(&img)) {
      const ColorImage out =
          poisson ? poisson_sample(*c, o.seed) : add_awgn(*c, {o.sigma, o.seed});
      write_image(o.out, out);
      mean = mean_sample(out);
    } else {
      const Plane& g = std::get<GrayImage>(img);
      const Plane out =
          poisson ? poisson_sample(g, o.seed) : add_awgn(g, {o.sigma, o.seed});
      write_image(o.out, out);
      mean = mean_sample(out);
    }
  }
  m["aggregate"]["mean"] = number(mean);
  set_timings(m, {}, start);
  emit_manifest(ctx, m, sidecar_manifest(o.out));
  return kExitOk;
}

void score_against_truth(json& m, const std::string& truth,
                         const ColorImage& estimate) {
  if (truth.empty()) return;
  const ColorImage t = read_color_image(truth);
  m["config"]["truth"] = truth;
  m["aggregate"]["cpsnr"] = number(cpsnr(estimate, t));
  m["aggregate"]["rmse"] = number(rmse(estimate, t));
}

struct DemosaicCmd {
  std::string in, out, method = "ha", truth;
};

int do_demosaic(Context& ctx, const DemosaicCmd& o) {
  const auto start = Clock::now();
  const DemosaicerId id = parse_demosaicer(o.method);
  const CfaImage cfa = read_cfa(o.in);
  StageTimings t;
  const auto t0 = Clock::now();
  const ColorImage out = demosaic(cfa, id);
  t.demosaic_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_image(o.out, out);
  json m = new_manifest(ctx, "demosaic");
  m["config"] = {{"in", o.in}, {"out", o.out}};
  m["components"]["dm"] = demosaicer_name(id);
  m["aggregate"]["mean"] = number(mean_sample(out));
  score_against_truth(m, o.truth, out);
  set_timings(m, t, start);
  emit_manifest(ctx, m, sidecar_manifest(o.out));
  return kExitOk;
}

struct DenoiseCmd {
  std::string in, out, method = "dct8", truth;
  double sigma = 0.0;
  bool cfa = false;
};

int do_denoise(Context& ctx, const DenoiseCmd& o) {
  const auto start = Clock::now();
  const DenoiserId id = parse_denoiser(o.method);
  DenoiseConfig cfg;
  cfg.sigma = o.sigma;
  json m = new_manifest(ctx, "denoise");
  m["config"] = {{"in", o.in}, {"out", o.out}, {"sigma", o.sigma}, {"cfa", o.cfa}};
  m["components"]["dn"] = denoiser_name(id);
  StageTimings t;
  const auto t0 = Clock::now();
  if (o.cfa) {
    const CfaImage out = denoise_cfa(read_cfa(o.in), id, cfg);
    t.denoise_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    write_cfa(o.out, out);
    m["aggregate"]["mean"] = number(mean_sample(out.plane()));
  } else {
    const ColorImage out = denoise_rgb(read_color_image(o.in), id, cfg);
    t.denoise_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    write_image(o.out, out);
    m["aggregate"]["mean"] = number(mean_sample(out));
    score_against_truth(m, o.truth, out);
  }
  set_timings(m, t, start);
  emit_manifest(ctx, m, sidecar_manifest(o.out));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Pipeline commands

struct PipelineRunCmd {
  std::string in, out, truth, preset;
  DatasetOptions data;
  ComponentOptions comp;
  PipelineParams params;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string model = "awgn";
  int jobs = 1;
  bool save_images = false;
};

int do_pipeline_run(Context& ctx, PipelineRunCmd& o) {
  const auto start = Clock::now();
  PipelineSpec spec = o.comp.spec();
  spec.params = o.preset.empty() ? o.params : preset(parse_preset(o.preset), o.sigma);
  spec.params.validate();

  json m = new_manifest(ctx, "pipeline run");
  m["config"]["params"] = params_json(spec.params);
  if (!o.preset.empty()) m["config"]["preset"] = preset_name(parse_preset(o.preset));
  o.comp.record(m);
  StageTimings timings;

  if (!o.in.empty()) {
    if (!o.data.dir.empty()) throw ParameterError("use either --in or --dataset");
    const ColorImage out = run_pipeline(read_cfa(o.in), spec, &timings);
    write_image(o.out, out);
    m["config"]["in"] = o.in;
    m["config"]["out"] = o.out;
    m["aggregate"]["mean"] = number(mean_sample(out));
    score_against_truth(m, o.truth, out);
    set_timings(m, timings, start);
    emit_manifest(ctx, m, sidecar_manifest(o.out));
    return kExitOk;
  }
  if (o.data.dir.empty()) throw ParameterError("pipeline run needs --in or --dataset");

  const Dataset ds = o.data.load();
  const NoisyDataset noisy =
      noisy_dataset(ds, o.model, o.sigma, o.seed, parse_phase(o.data.phase));
  const fs::path dir = ensure_dir(o.out);
  const DatasetScore score = score_dataset(noisy, spec, o.jobs, timings);

  o.data.record(m);
  m["config"]["sigma"] = o.sigma;
  m["config"]["noise_model"] = o.model;
  m["config"]["out"] = o.out;
  record_seeds(m, o.seed, noisy);
  record_images(m, ds);
  std::ostringstream csv;
  csv << "image,seed,cpsnr\n";
  for (std::size_t k = 0; k < ds.paths.size(); ++k) {
    m["images"][k]["seed"] = noisy.seeds[k];
    m["images"][k]["metrics"]["cpsnr"] = number(score.per_image[k]);
    csv << ds.paths[k].filename().string() << "," << noisy.seeds[k] << ","
        << csv_number(score.per_image[k]) << "\n";
    if (o.save_images) {
      write_image(dir / (ds.paths[k].stem().string() + "_out.pfm"),
                  run_pipeline(noisy.noisy[k], spec));
    }
  }
  m["aggregate"]["mean_cpsnr"] = number(score.mean);
  write_text(dir / "pipeline.csv", csv.str());
  set_timings(m, timings, start);
  emit_manifest(ctx, m, dir / kManifestName);
  ctx.out << "mean CPSNR " << csv_number(score.mean) << " dB over "
          << ds.images.size() << " images\n";
  return kExitOk;
}

struct PresetCmd {
  std::string name;
  double sigma = 0.0;
  bool as_json = false;
};

int do_preset(Context& ctx, const PresetCmd& o) {
  const Preset p = parse_preset(o.name);
  const PipelineParams params = preset(p, o.sigma);
  if (o.as_json) {
    json j = params_json(params);
    j["preset"] = preset_name(p);
    ctx.out << j.dump() << "\n";
  } else {
    ctx.out << "(" << params.alpha << "," << params.beta << "," << params.sigma1
            << "," << params.sigma2 << ")\n";
  }
  return kExitOk;
}

struct SweepCmd {
  DatasetOptions data;
  std::string dm = "ha", dn = "dct8", out;
  double sigma = 0.0;
  std::vector<double> ks{1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9};
  std::uint64_t seed = 0;
  int jobs = 1;
};

int do_sweep(Context& ctx, const SweepCmd& o) {
  const auto start = Clock::now();
  const DemosaicerId dm = parse_demosaicer(o.dm);
  const DenoiserId dn = parse_denoiser(o.dn);
  const Dataset ds = o.data.load();
  const NoisyDataset noisy =
      make_noisy_dataset(ds.images, o.sigma, o.seed, parse_phase(o.data.phase));
  const fs::path dir = ensure_dir(o.out);

  std::vector<std::vector<KScore>> rows(ds.images.size());
  parallel_for(ds.images.size(), o.jobs, [&](std::size_t k) {
    rows[k] = sweep_k(noisy.noisy[k], noisy.truth[k], dm, dn, o.sigma, o.ks);
  });

  json m = new_manifest(ctx, "pipeline sweep-k");
  o.data.record(m);
  m["config"]["sigma"] = o.sigma;
  m["config"]["k"] = o.ks;
  m["config"]["out"] = o.out;
  m["components"]["dm"] = demosaicer_name(dm);
  m["components"]["dn"] = denoiser_name(dn);
  record_seeds(m, o.seed, noisy);
  record_images(m, ds);

  std::ostringstream csv;
  csv << "k,mean_cpsnr";
  for (const auto& p : ds.paths) csv << "," << p.filename().string();
  csv << "\n";
  double best_k = o.ks.front(), best = -INFINITY;
  for (std::size_t i = 0; i < o.ks.size(); ++i) {
    std::vector<double> per;
    for (std::size_t k = 0; k < rows.size(); ++k) per.push_back(rows[k][i].cpsnr);
    const double mean = mean_of(per);
    if (mean > best) {
      best = mean;
      best_k = o.ks[i];
    }
    const std::string key = "k=" + csv_number(o.ks[i]);
    m["aggregate"][key] = number(mean);
    csv << csv_number(o.ks[i]) << "," << csv_number(mean);
    for (std::size_t k = 0; k < per.size(); ++k) {
      csv << "," << csv_number(per[k]);
      m["images"][k]["metrics"][key] = number(per[k]);
    }
    csv << "\n";
  }
  m["aggregate"]["best_k"] = best_k;
  write_text(dir / "sweep_k.csv", csv.str());
  set_timings(m, {}, start);
  emit_manifest(ctx, m, dir / kManifestName);
  ctx.out << "best k " << best_k << " (" << csv_number(best) << " dB)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Tuning and evaluation

struct TuneCmd {
  DatasetOptions data;
  ComponentOptions comp;
  std::string out;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  long max_evals = 3000;
  int population = 0;
  int window = 20;
  double tolerance = 1e-4;
  int jobs = 1;
};

CmaConfig tune_config(const TuneCmd& o) {
  CmaConfig cfg;
  cfg.seed = o.seed;
  cfg.max_evaluations = o.max_evals;
  cfg.population = o.population;
  cfg.stagnation_window = o.window;
  cfg.stagnation_tolerance = o.tolerance;
  cfg.jobs = o.jobs;
  return cfg;
}

int do_tune(Context& ctx, const TuneCmd& o) {
  const auto start = Clock::now();
  const PipelineSpec components = o.comp.spec();
  const Dataset ds = o.data.load();
  const NoisyDataset noisy =
      make_noisy_dataset(ds.images, o.sigma, o.seed, parse_phase(o.data.phase));
  const fs::path dir = ensure_dir(o.out);
  const CmaConfig cfg = tune_config(o);
  const TuneResult r = tune_pipeline(noisy, components, cfg);

  PipelineSpec best = components;
  best.params = params_from_vector(r.best_params);
  StageTimings timings;
  const DatasetScore score = score_dataset(noisy, best, o.jobs, timings);

  json result;
  result["best_params"] = params_json(best.params);
  result["best_value"] = number(r.best_value);
  result["termination"] = termination_name(r.reason);
  result["evaluations"] = r.evaluations;
  result["trace"] = json::array();
  std::ostringstream csv;
  csv << "generation,evaluations,best,mean\n";
  for (std::size_t g = 0; g < r.trace.size(); ++g) {
    const GenerationRecord& rec = r.trace[g];
    result["trace"].push_back(json{{"generation", g + 1},
                                   {"evaluations", rec.evaluations},
                                   {"best", number(rec.best)},
                                   {"mean", number(rec.mean)}});
    csv << g + 1 << "," << rec.evaluations << "," << csv_number(rec.best) << ","
        << csv_number(rec.mean) << "\n";
  }
  write_text(dir / "tune_result.json", result.dump(2) + "\n");
  write_text(dir / "trace.csv", csv.str());

  json m = new_manifest(ctx, "tune");
  o.data.record(m);
  o.comp.record(m);
  m["config"]["sigma"] = o.sigma;
  m["config"]["max_evals"] = o.max_evals;
  m["config"]["population"] = o.population;
  m["config"]["stagnation_window"] = o.window;
  m["config"]["stagnation_tolerance"] = o.tolerance;
  m["config"]["out"] = o.out;
  record_seeds(m, o.seed, noisy);
  record_images(m, ds);
  for (std::size_t k = 0; k < ds.paths.size(); ++k) {
    m["images"][k]["seed"] = noisy.seeds[k];
    m["images"][k]["metrics"]["cpsnr"] = number(score.per_image[k]);
  }
  m["aggregate"]["best_value"] = number(r.best_value);
  m["aggregate"]["alpha"] = best.params.alpha;
  m["aggregate"]["beta"] = best.params.beta;
  m["aggregate"]["sigma1"] = best.params.sigma1;
  m["aggregate"]["sigma2"] = best.params.sigma2;
  m["aggregate"]["evaluations"] = r.evaluations;
  m["aggregate"]["termination"] = termination_name(r.reason);
  set_timings(m, timings, start);
  emit_manifest(ctx, m, dir / kManifestName);
  ctx.out << "alpha " << best.params.alpha << " beta " << best.params.beta
          << " sigma1 " << best.params.sigma1 << " sigma2 " << best.params.sigma2
          << " CPSNR " << csv_number(r.best_value) << " ("
          << termination_name(r.reason) << ", " << r.evaluations
          << " evaluations)\n";
  return kExitOk;
}

struct EvalCmd {
  DatasetOptions data;
  ComponentOptions comp;
  std::string out;
  std::vector<double> sigmas{5, 10, 20, 40, 50, 60};
  std::uint64_t seed = 0;
  bool tune = false;
  long max_evals = 3000;
  int jobs = 1;
};

int do_eval(Context& ctx, const EvalCmd& o) {
  const auto start = Clock::now();
  const PipelineSpec components = o.comp.spec();
  const Dataset ds = o.data.load();
  const fs::path dir = ensure_dir(o.out);
  const CfaPhase phase = parse_phase(o.data.phase);

  json m = new_manifest(ctx, "eval");
  o.data.record(m);
  o.comp.record(m);
  m["config"]["sigmas"] = o.sigmas;
  m["config"]["tune"] = o.tune;
  m["config"]["max_evals"] = o.max_evals;
  m["config"]["out"] = o.out;
  m["master_seed"] = o.seed;
  record_images(m, ds);

  StageTimings timings;
  std::ostringstream csv;
  csv << "sigma,method,alpha,beta,sigma1,sigma2,cpsnr\n";
  for (double sigma : o.sigmas) {
    const NoisyDataset noisy = make_noisy_dataset(ds.images, sigma, o.seed, phase);
    m["image_seeds"] = noisy.seeds;
    struct Row {
      std::string method;
      PipelineParams params;
    };
    std::vector<Row> rows;
    for (Preset p : {Preset::kDnDm, Preset::kDmDn, Preset::kDm15Dn}) {
      rows.push_back({std::string(preset_name(p)), preset(p, sigma)});
    }
    if (o.tune) {
      CmaConfig cfg;
      cfg.seed = o.seed;
      cfg.max_evaluations = o.max_evals;
      cfg.jobs = o.jobs;
      const TuneResult r = tune_pipeline(noisy, components, cfg);
      rows.push_back({"CMA-ES", params_from_vector(r.best_params)});
    }
    for (const Row& row : rows) {
      PipelineSpec spec = components;
      spec.params = row.params;
      const DatasetScore score = score_dataset(noisy, spec, o.jobs, timings);
      const std::string key = "sigma=" + csv_number(sigma) + "/" + row.method;
      m["aggregate"][key] = number(score.mean);
      for (std::size_t k = 0; k < score.per_image.size(); ++k) {
        m["images"][k]["metrics"][key] = number(score.per_image[k]);
      }
      const PipelineParams& p = row.params;
      csv << csv_number(sigma) << "," << row.method << "," << csv_number(p.alpha)
          << "," << csv_number(p.beta) << "," << csv_number(p.sigma1) << ","
          << csv_number(p.sigma2) << "," << csv_number(score.mean) << "\n";
    }
  }
  write_text(dir / "eval.csv", csv.str());
  set_timings(m, timings, start);
  emit_manifest(ctx, m, dir / kManifestName);
  ctx.out << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Analysis commands

struct StatsCmd {
  DatasetOptions data;
  std::string dm = "ha", space = "yc1c2", out;
  double sigma = 20.0;
  int lags = kMaxLag;
  int crop = 8;
  std::uint64_t seed = 0;
  int jobs = 1;
};

int do_stats(Context& ctx, const StatsCmd& o) {
  const auto start = Clock::now();
  if (o.lags < 0 || o.lags > kMaxLag) {
    throw ParameterError("--lags must lie in [0, " + std::to_string(kMaxLag) + "]");
  }
  const DemosaicerId dm = parse_demosaicer(o.dm);
  const StatsSpace space = parse_stats_space(o.space);
  const Dataset ds = o.data.load();
  const NoisyDataset noisy =
      make_noisy_dataset(ds.images, o.sigma, o.seed, parse_phase(o.data.phase));
  const fs::path dir = ensure_dir(o.out);

  std::vector<NoiseStats> per(ds.images.size());
  parallel_for(per.size(), o.jobs, [&](std::size_t k) {
    per[k] = noise_stats(residual(demosaic(noisy.noisy[k], dm), noisy.truth[k]),
                         space, o.crop);
  });
  const NoiseStats avg = average_stats(per);

  const char* names_rgb[3] = {"R", "G", "B"};
  const char* names_opp[3] = {"Y", "C1", "C2"};
  const char** names = space == StatsSpace::kRgb ? names_rgb : names_opp;

  std::ostringstream lag_csv;
  lag_csv << "table,channel";
  for (int s = 0; s <= o.lags; ++s)
    for (int t = 0; t <= o.lags; ++t) {
      lag_csv << ",(i";
      if (s) lag_csv << "+" << s;
      lag_csv << ";j";
      if (t) lag_csv << "+" << t;
      lag_csv << ")";
    }
  lag_csv << "\n";
  for (const char* table : {"covariance", "correlation"}) {
    const bool is_cov = std::string(table) == "covariance";
    for (int c = 0; c < 3; ++c) {
      lag_csv << table << "," << names[c];
      for (int s = 0; s <= o.lags; ++s)
        for (int t = 0; t <= o.lags; ++t)
          lag_csv << "," << csv_number(is_cov ? avg.cov[c][s][t] : avg.corr[c][s][t]);
      lag_csv << "\n";
    }
  }
  std::ostringstream ch_csv;
  ch_csv << "table,channel," << names[0] << "," << names[1] << "," << names[2]
         << "\n";
  for (const char* table : {"covariance", "correlation"}) {
    const bool is_cov = std::string(table) == "covariance";
    for (int a = 0; a < 3; ++a) {
      ch_csv << table << "," << names[a];
      for (int b = 0; b < 3; ++b)
        ch_csv << "," << csv_number(is_cov ? avg.cross_cov[a][b] : avg.cross_corr[a][b]);
      ch_csv << "\n";
    }
  }
  write_text(dir / "stats_lags.csv", lag_csv.str());
  write_text(dir / "stats_channels.csv", ch_csv.str());

  json m = new_manifest(ctx, "stats");
  o.data.record(m);
  m["config"]["sigma"] = o.sigma;
  m["config"]["space"] = stats_space_name(space);
  m["config"]["lags"] = o.lags;
  m["config"]["border_crop"] = o.crop;
  m["config"]["out"] = o.out;
  m["components"]["dm"] = demosaicer_name(dm);
  record_seeds(m, o.seed, noisy);
  record_images(m, ds);
  for (std::size_t k = 0; k < per.size(); ++k)
    for (int c = 0; c < 3; ++c)
      m["images"][k]["metrics"][std::string("var_") + names[c]] =
          number(per[k].variance[c]);
  for (int c = 0; c < 3; ++c) {
    m["aggregate"][std::string("var_") + names[c]] = number(avg.variance[c]);
    m["aggregate"][std::string("corr01_") + names[c]] = number(avg.corr[c][0][1]);
  }
  if (space == StatsSpace::kYc1c2 && o.sigma > 0) {
    m["aggregate"]["amplification"] = number(amplification_factor(avg, o.sigma));
  }
  set_timings(m, {}, start);
  emit_manifest(ctx, m, dir / kManifestName);
  ctx.out << lag_csv.str() << ch_csv.str();
  return kExitOk;
}

struct RmseCmd {
  DatasetOptions data;
  std::string dm = "ha", out;
  std::vector<double> sigmas{0, 1, 3, 5, 10, 20, 40};
  std::uint64_t seed = 0;
  int jobs = 1;
};

int do_rmse(Context& ctx, const RmseCmd& o) {
  const auto start = Clock::now();
  const DemosaicerId dm = parse_demosaicer(o.dm);
  const Dataset ds = o.data.load();
  const fs::path dir = ensure_dir(o.out);
  const CfaPhase phase = parse_phase(o.data.phase);

  // One image per task; each task computes its own row entries.
  std::vector<std::vector<RmseRow>> per(ds.images.size());
  parallel_for(per.size(), o.jobs, [&](std::size_t k) {
    // rmse_table derives image_seed(seed, index); pass the single image with
    // a seed that reproduces index k.
    per[k] = rmse_table(std::span<const ColorImage>(&ds.images[k], 1), dm,
                        o.sigmas, o.seed ^ k, phase);
  });

  json m = new_manifest(ctx, "rmse-table");
  o.data.record(m);
  m["config"]["sigmas"] = o.sigmas;
  m["config"]["out"] = o.out;
  m["components"]["dm"] = demosaicer_name(dm);
  m["master_seed"] = o.seed;
  for (std::size_t k = 0; k < ds.images.size(); ++k)
    m["image_seeds"].push_back(image_seed(o.seed, k));
  record_images(m, ds);

  std::ostringstream csv;
  csv << "sigma,mean_rmse";
  for (const auto& p : ds.paths) csv << "," << p.filename().string();
  csv << "\n";
  for (std::size_t i = 0; i < o.sigmas.size(); ++i) {
    std::vector<double> row;
    for (std::size_t k = 0; k < per.size(); ++k) row.push_back(per[k][i].per_image[0]);
    const double mean = mean_of(row);
    const std::string key = "sigma=" + csv_number(o.sigmas[i]);
    m["aggregate"][key] = number(mean);
    csv << csv_number(o.sigmas[i]) << "," << csv_number(mean);
    for (std::size_t k = 0; k < row.size(); ++k) {
      csv << "," << csv_number(row[k]);
      m["images"][k]["metrics"][key] = number(row[k]);
    }
    csv << "\n";
  }
  write_text(dir / "rmse_table.csv", csv.str());
  set_timings(m, {}, start);
  emit_manifest(ctx, m, dir / kManifestName);
  ctx.out << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Replay

int dispatch(Context& ctx);

// Points every --out at a scratch location so replays never overwrite.
std::vector<std::string> redirect_outputs(std::vector<std::string> args,
                                          const fs::path& scratch) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out" && i + 1 < args.size()) {
      args[i + 1] = (scratch / fs::path(args[i + 1]).filename()).string();
    } else if (args[i].rfind("--out=", 0) == 0) {
      args[i] = "--out=" +
                (scratch / fs::path(args[i].substr(6)).filename()).string();
    }
  }
  return args;
}

struct ReplayCmd {
  std::string manifest;
  std::string scratch;
};

int do_replay(Context& ctx, const ReplayCmd& o) {
  json recorded;
  const std::string text = read_text(o.manifest);
  try {
    recorded = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("manifest is not valid JSON: " + std::string(e.what()),
                     e.byte == 0 ? 0 : e.byte - 1);
  }
  if (!recorded.contains("argv") || !recorded["argv"].is_array()) {
    throw ParseError("manifest has no argv array", 0);
  }
  std::vector<std::string> args = recorded["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args[0] == "replay") {
    throw ParameterError("refusing to replay a replay");
  }
  const fs::path scratch = o.scratch.empty()
                               ? fs::temp_directory_path() / "bayerpipe_replay"
                               : fs::path(o.scratch);
  fs::remove_all(scratch);
  ensure_dir(scratch.string());

  const fs::path here = fs::current_path();
  const std::string cwd = recorded.value("cwd", here.string());
  json fresh;
  std::ostringstream sink;
  Context inner{redirect_outputs(args, scratch), sink, ctx.err, &fresh};
  int code;
  try {
    fs::current_path(cwd);
    code = dispatch(inner);
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  if (code != kExitOk) return code;

  bool same = true;
  const json& a = recorded["aggregate"];
  const json& b = fresh["aggregate"];
  for (auto it = a.begin(); it != a.end(); ++it) {
    const bool ok = b.contains(it.key()) && b[it.key()] == it.value();
    same = same && ok;
    ctx.out << (ok ? "same " : "DIFF ") << it.key() << " recorded "
            << it.value().dump() << " replayed "
            << (b.contains(it.key()) ? b[it.key()].dump() : "missing") << "\n";
  }
  if (b.size() != a.size()) same = false;
  const json& ia = recorded["images"];
  const json& ib = fresh["images"];
  if (ia.size() != ib.size()) {
    same = false;
  } else {
    for (std::size_t k = 0; k < ia.size(); ++k) {
      if (ia[k].value("metrics", json::object()) != ib[k].value("metrics", json::object())) {
        same = false;
        ctx.out << "DIFF per-image metrics of " << ia[k].value("path", "?") << "\n";
      }
    }
  }
  ctx.out << (same ? "reproduced" : "NOT reproduced") << "\n";
  return same ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------------------

int dispatch(Context& ctx) {
  CLI::App app{"Bayer denoise/demosaic pipeline experiments", "bayerpipe"};
  app.require_subcommand(1);

  MosaicCmd mosaic_o;
  auto* mosaic_c = app.add_subcommand("mosaic", "Sample a color image into a Bayer CFA");
  mosaic_c->add_option("--in", mosaic_o.in, "Color image")->required();
  mosaic_c->add_option("--out", mosaic_o.out, "Output CFA (.pfm)")->required();
  mosaic_c->add_option("--phase", mosaic_o.phase, "Bayer phase");

  NoiseCmd noise_o;
  auto* noise_c = app.add_subcommand("noise", "Add seeded noise to an image or CFA");
  noise_c->add_option("--in", noise_o.in, "Input image")->required();
  noise_c->add_option("--out", noise_o.out, "Output image")->required();
  noise_c->add_option("--sigma", noise_o.sigma, "AWGN standard deviation");
  noise_c->add_option("--seed", noise_o.seed, "Random seed");
  noise_c->add_option("--model", noise_o.model, "awgn or poisson");
  noise_c->add_flag("--cfa", noise_o.cfa, "Input is a CFA with phase sidecar");

  DemosaicCmd dm_o;
  auto* dm_c = app.add_subcommand("demosaic", "Demosaic a CFA");
  dm_c->add_option("--in", dm_o.in, "Input CFA")->required();
  dm_c->add_option("--out", dm_o.out, "Output color image")->required();
  dm_c->add_option("--method", dm_o.method, "bilinear, ha or malvar");
  dm_c->add_option("--truth", dm_o.truth, "Ground truth for CPSNR/RMSE");

  DenoiseCmd dn_o;
  auto* dn_c = app.add_subcommand("denoise", "Denoise a color image or CFA");
  dn_c->add_option("--in", dn_o.in, "Input image")->required();
  dn_c->add_option("--out", dn_o.out, "Output image")->required();
  dn_c->add_option("--method", dn_o.method, "dct8, nlmeans or identity");
  dn_c->add_option("--sigma", dn_o.sigma, "Assumed noise level")->required();
  dn_c->add_flag("--cfa", dn_o.cfa, "Denoise a CFA through the half-image split");
  dn_c->add_option("--truth", dn_o.truth, "Ground truth for CPSNR/RMSE");

  auto* pipe_c = app.add_subcommand("pipeline", "Denoise/demosaic compositions");
  pipe_c->require_subcommand(1);

  PipelineRunCmd run_o;
  auto* run_c = pipe_c->add_subcommand("run", "Run DN1 & DM & DN2");
  run_c->add_option("--in", run_o.in, "Noisy CFA (single-image mode)");
  run_c->add_option("--truth", run_o.truth, "Ground truth (single-image mode)");
  run_c->add_option("--out", run_o.out, "Output image or directory")->required();
  run_c->add_option("--dataset", run_o.data.dir, "Ground-truth directory");
  run_c->add_option("--center-crop", run_o.data.crop, "Centered crop size");
  run_c->add_option("--limit", run_o.data.limit, "Use only the first N images");
  run_c->add_option("--phase", run_o.data.phase, "Bayer phase");
  run_c->add_option("--alpha", run_o.params.alpha, "CFA denoising weight");
  run_c->add_option("--beta", run_o.params.beta, "Color denoising weight");
  run_c->add_option("--sigma1", run_o.params.sigma1, "CFA denoiser sigma");
  run_c->add_option("--sigma2", run_o.params.sigma2, "Color denoiser sigma");
  run_c->add_option("--preset", run_o.preset, "dndm, dmdn or dm15dn (uses --sigma)");
  run_c->add_option("--sigma", run_o.sigma, "Noise level of the dataset run");
  run_c->add_option("--seed", run_o.seed, "Master noise seed");
  run_c->add_option("--model", run_o.model, "Dataset noise: awgn or poisson");
  run_c->add_option("--jobs", run_o.jobs, "Parallel images");
  run_c->add_flag("--save-images", run_o.save_images, "Also write outputs as PFM");
  run_o.comp.add(run_c);

  PresetCmd preset_o;
  auto* preset_c = pipe_c->add_subcommand("preset", "Print preset parameters");
  preset_c->add_option("--name", preset_o.name, "dndm, dmdn or dm15dn")->required();
  preset_c->add_option("--sigma", preset_o.sigma, "Noise level")->required();
  preset_c->add_flag("--json", preset_o.as_json, "Print JSON");

  SweepCmd sweep_o;
  auto* sweep_c = pipe_c->add_subcommand("sweep-k", "DM & kDN over a list of k");
  sweep_o.data.add(sweep_c);
  sweep_c->add_option("--sigma", sweep_o.sigma, "Noise level")->required();
  sweep_c->add_option("--k", sweep_o.ks, "Comma-separated multipliers")->delimiter(',');
  sweep_c->add_option("--dm", sweep_o.dm, "Demosaicer");
  sweep_c->add_option("--dn", sweep_o.dn, "Denoiser");
  sweep_c->add_option("--seed", sweep_o.seed, "Master noise seed");
  sweep_c->add_option("--jobs", sweep_o.jobs, "Parallel images");
  sweep_c->add_option("--out", sweep_o.out, "Output directory")->required();

  TuneCmd tune_o;
  auto* tune_c = app.add_subcommand("tune", "CMA-ES search of (alpha, beta, sigma1, sigma2)");
  tune_o.data.add(tune_c);
  tune_o.comp.add(tune_c);
  tune_c->add_option("--sigma", tune_o.sigma, "Noise level")->required();
  tune_c->add_option("--seed", tune_o.seed, "Seed for noise and CMA-ES");
  tune_c->add_option("--max-evals", tune_o.max_evals, "Evaluation budget");
  tune_c->add_option("--population", tune_o.population, "Population (0: default)");
  tune_c->add_option("--window", tune_o.window, "Stagnation window (generations)");
  tune_c->add_option("--tolerance", tune_o.tolerance, "Stagnation tolerance (dB)");
  tune_c->add_option("--jobs", tune_o.jobs, "Parallel candidate evaluations");
  tune_c->add_option("--out", tune_o.out, "Output directory")->required();

  StatsCmd stats_o;
  auto* stats_c = app.add_subcommand("stats", "Demosaiced-noise statistics");
  stats_o.data.add(stats_c);
  stats_c->add_option("--sigma", stats_o.sigma, "Noise level");
  stats_c->add_option("--dm", stats_o.dm, "Demosaicer");
  stats_c->add_option("--space", stats_o.space, "rgb or yc1c2");
  stats_c->add_option("--lags", stats_o.lags, "Largest spatial lag");
  stats_c->add_option("--crop", stats_o.crop, "Border pixels discarded");
  stats_c->add_option("--seed", stats_o.seed, "Master noise seed");
  stats_c->add_option("--jobs", stats_o.jobs, "Parallel images");
  stats_c->add_option("--out", stats_o.out, "Output directory")->required();

  RmseCmd rmse_o;
  auto* rmse_c = app.add_subcommand("rmse-table", "Demosaicing RMSE against noise level");
  rmse_o.data.add(rmse_c);
  rmse_c->add_option("--dm", rmse_o.dm, "Demosaicer");
  rmse_c->add_option("--sigmas", rmse_o.sigmas, "Comma-separated noise levels")
      ->delimiter(',');
  rmse_c->add_option("--seed", rmse_o.seed, "Master noise seed");
  rmse_c->add_option("--jobs", rmse_o.jobs, "Parallel images");
  rmse_c->add_option("--out", rmse_o.out, "Output directory")->required();

  EvalCmd eval_o;
  auto* eval_c = app.add_subcommand("eval", "Compare presets (and CMA-ES) per noise level");
  eval_o.data.add(eval_c);
  eval_o.comp.add(eval_c);
  eval_c->add_option("--sigmas", eval_o.sigmas, "Comma-separated noise levels")
      ->delimiter(',');
  eval_c->add_option("--seed", eval_o.seed, "Master seed");
  eval_c->add_flag("--tune", eval_o.tune, "Add a CMA-ES row per noise level");
  eval_c->add_option("--max-evals", eval_o.max_evals, "CMA-ES budget per level");
  eval_c->add_option("--jobs", eval_o.jobs, "Parallel images");
  eval_c->add_option("--out", eval_o.out, "Output directory")->required();

  ReplayCmd replay_o;
  auto* replay_c = app.add_subcommand("replay", "Re-run a manifest and compare metrics");
  replay_c->add_option("--manifest", replay_o.manifest, "RunManifest JSON")->required();
  replay_c->add_option("--scratch", replay_o.scratch, "Directory for replay outputs");

  std::vector<std::string> reversed(ctx.args.rbegin(), ctx.args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, ctx.out, ctx.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*mosaic_c) return do_mosaic(ctx, mosaic_o);
  if (*noise_c) return do_noise(ctx, noise_o);
  if (*dm_c) return do_demosaic(ctx, dm_o);
  if (*dn_c) return do_denoise(ctx, dn_o);
  if (*run_c) return do_pipeline_run(ctx, run_o);
  if (*preset_c) return do_preset(ctx, preset_o);
  if (*sweep_c) return do_sweep(ctx, sweep_o);
  if (*tune_c) return do_tune(ctx, tune_o);
  if (*stats_c) return do_stats(ctx, stats_o);
  if (*rmse_c) return do_rmse(ctx, rmse_o);
  if (*eval_c) return do_eval(ctx, eval_o);
  if (*replay_c) return do_replay(ctx, replay_o);
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Context ctx{args, out, err};
  try {
    return dispatch(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kParse: return kExitParse;
      case ErrorKind::kIo: return kExitIo;
      case ErrorKind::kDimension:
      case ErrorKind::kParameter:
      case ErrorKind::kDomain: return kExitInvalid;
    }
    return kExitInternal;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace bayerpipe::cli
