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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bayerpipe/dataset.hpp"
#include "bayerpipe/error.hpp"
#include "bayerpipe/image_io.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

namespace bayerpipe {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::natural_dir;
using testing::scratch_dir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(2);
}

TEST_CASE("dataset loading is sorted and validated") {
  const Dataset ds = load_dataset(natural_dir());
  REQUIRE(ds.paths.size() == 5);
  CHECK(ds.paths.front().filename() == "astronaut.ppm");
  CHECK(ds.paths.back().filename() == "rocket.ppm");
  for (std::size_t k = 1; k < ds.paths.size(); ++k) {
    CHECK(ds.paths[k - 1].filename().string() < ds.paths[k].filename().string());
  }
  CHECK(ds.images[0].width() == 256);

  const fs::path empty = scratch_dir("empty_dataset");
  CHECK_THROWS_AS(load_dataset(empty), IoError);
  CHECK_THROWS_AS(load_dataset(natural_dir() / "coffee.ppm"), IoError);
}

TEST_CASE("preset subcommand prints the tuple") {
  const Result r = run_cli({"pipeline", "preset", "--name", "dm15dn", "--sigma", "20"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "(0,1,0,30)\n");
  CHECK(run_cli({"pipeline", "preset", "--name", "dndm", "--sigma", "5"}).out ==
        "(1,0,5,0)\n");
}

TEST_CASE("exit codes follow the error kind") {
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"pipeline", "preset", "--sigma", "20"}).code == cli::kExitUsage);
  CHECK(run_cli({"pipeline", "preset", "--name", "nope", "--sigma", "20"}).code ==
        cli::kExitInvalid);
  CHECK(run_cli({"pipeline", "preset", "--name", "dmdn", "--sigma", "-1"}).code ==
        cli::kExitInvalid);

  const fs::path dir = scratch_dir("cli_codes");
  CHECK(run_cli({"demosaic", "--in", (dir / "missing.pfm").string(), "--out",
                 (dir / "x.pfm").string()})
            .code == cli::kExitIo);

  {
    std::ofstream bad(dir / "bad.ppm", std::ios::binary);
    bad << "P6\n0 4\n255\n";
  }
  const Result parse = run_cli({"mosaic", "--in", (dir / "bad.ppm").string(),
                                "--out", (dir / "x.pfm").string()});
  CHECK(parse.code == cli::kExitParse);
  CHECK(parse.err.find("offset 3") != std::string::npos);

  {
    std::ofstream odd(dir / "odd.ppm", std::ios::binary);
    odd << "P6\n3 2\n255\n" << std::string(18, '\x10');
  }
  CHECK(run_cli({"mosaic", "--in", (dir / "odd.ppm").string(), "--out",
                 (dir / "x.pfm").string()})
            .code == cli::kExitInvalid);

  {
    std::ofstream junk(dir / "junk.json");
    junk << "{\"argv\": [";
  }
  CHECK(run_cli({"replay", "--manifest", (dir / "junk.json").string()}).code ==
        cli::kExitParse);
}

TEST_CASE("single-image commands chain and store infinities as strings") {
  const fs::path dir = scratch_dir("cli_chain");
  write_image(dir / "flat.ppm", testing::constant_color(16, 16, 40, 90, 200));
  const std::string cfa = (dir / "flat_cfa.pfm").string();
  const std::string rgb = (dir / "flat_rgb.pfm").string();
  REQUIRE(run_cli({"mosaic", "--in", (dir / "flat.ppm").string(), "--out", cfa})
              .code == cli::kExitOk);
  REQUIRE(run_cli({"demosaic", "--in", cfa, "--out", rgb, "--method", "ha",
                   "--truth", (dir / "flat.ppm").string()})
              .code == cli::kExitOk);
  const json m = read_json(rgb + ".manifest.json");
  CHECK(m["subcommand"] == "demosaic");
  CHECK(m["aggregate"]["cpsnr"] == "inf");
  CHECK(m["aggregate"]["rmse"] == 0.0);
  CHECK(m["timings"].contains("demosaic_seconds"));

  const std::string noisy = (dir / "noisy.pfm").string();
  REQUIRE(run_cli({"noise", "--in", cfa, "--cfa", "--sigma", "10", "--seed", "5",
                   "--out", noisy})
              .code == cli::kExitOk);
  CHECK(read_json(noisy + ".manifest.json")["master_seed"] == 5);
  CHECK(fs::exists(noisy));

  const Result replay =
      run_cli({"replay", "--manifest", rgb + ".manifest.json", "--scratch",
               (dir / "replay").string()});
  CHECK(replay.code == cli::kExitOk);
  CHECK(replay.out.find("reproduced") != std::string::npos);
}

TEST_CASE("dataset run writes a complete manifest and replays exactly") {
  const fs::path dir = scratch_dir("cli_dataset");
  const std::string out = (dir / "run").string();
  const Result r = run_cli({"pipeline", "run", "--dataset", natural_dir().string(),
                            "--center-crop", "64", "--limit", "3", "--sigma", "20",
                            "--seed", "11", "--preset", "dm15dn", "--jobs", "2",
                            "--out", out});
  REQUIRE(r.code == cli::kExitOk);
  const fs::path manifest = fs::path(out) / "manifest.json";
  const json m = read_json(manifest);
  for (const char* key : {"argv", "cwd", "config", "master_seed", "image_seeds",
                          "components", "images", "aggregate", "timings"}) {
    CHECK_MESSAGE(m.contains(key), key);
  }
  CHECK(m["master_seed"] == 11);
  CHECK(m["image_seeds"].size() == 3);
  CHECK(m["images"].size() == 3);
  CHECK(m["components"]["dm"] == "ha");
  CHECK(m["config"]["params"]["sigma2"] == 30.0);
  CHECK(fs::exists(fs::path(out) / "pipeline.csv"));

  // Single-threaded run gives identical numbers.
  const std::string out1 = (dir / "run1").string();
  REQUIRE(run_cli({"pipeline", "run", "--dataset", natural_dir().string(),
                   "--center-crop", "64", "--limit", "3", "--sigma", "20", "--seed",
                   "11", "--preset", "dm15dn", "--out", out1})
              .code == cli::kExitOk);
  CHECK(read_json(fs::path(out1) / "manifest.json")["aggregate"] == m["aggregate"]);

  const std::string scratch = (dir / "scratch").string();
  CHECK(run_cli({"replay", "--manifest", manifest.string(), "--scratch", scratch})
            .code == cli::kExitOk);

  json tampered = m;
  tampered["aggregate"]["mean_cpsnr"] = m["aggregate"]["mean_cpsnr"].get<double>() + 1e-9;
  write_json(dir / "tampered.json", tampered);
  const Result t = run_cli({"replay", "--manifest", (dir / "tampered.json").string(),
                            "--scratch", scratch});
  CHECK(t.code == cli::kExitMismatch);
  CHECK(t.out.find("DIFF mean_cpsnr") != std::string::npos);

  json seeded = m;
  for (auto& a : seeded["argv"])
    if (a == "11") a = "12";
  write_json(dir / "reseeded.json", seeded);
  CHECK(run_cli({"replay", "--manifest", (dir / "reseeded.json").string(),
                 "--scratch", scratch})
            .code == cli::kExitMismatch);
}

TEST_CASE("analysis and tuning subcommands write their tables") {
  const fs::path dir = scratch_dir("cli_tables");
  const std::string data = natural_dir().string();
  const std::vector<std::string> common = {"--dataset", data, "--center-crop", "64",
                                           "--limit", "2", "--seed", "3"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), common.begin(), common.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };

  REQUIRE(run_cli(with({"stats"}, {"--lags", "1", "--crop", "4", "--out", (dir / "st").string()}))
              .code == cli::kExitOk);
  std::ifstream lags(dir / "st" / "stats_lags.csv");
  std::string header;
  std::getline(lags, header);
  CHECK(header == "table,channel,(i;j),(i;j+1),(i+1;j),(i+1;j+1)");
  CHECK(run_cli(with({"stats"}, {"--lags", "3", "--out", (dir / "st").string()}))
            .code == cli::kExitInvalid);

  REQUIRE(run_cli(with({"rmse-table"}, {"--sigmas", "0,10", "--out",
                                        (dir / "rt").string()}))
              .code == cli::kExitOk);
  const json rt = read_json(dir / "rt" / "manifest.json");
  CHECK(rt["aggregate"]["sigma=0"].get<double>() <
        rt["aggregate"]["sigma=10"].get<double>());

  REQUIRE(run_cli(with({"pipeline", "sweep-k"}, {"--sigma", "20", "--k", "1,1.5",
                                                 "--out", (dir / "sk").string()}))
              .code == cli::kExitOk);
  CHECK(fs::exists(dir / "sk" / "sweep_k.csv"));

  REQUIRE(run_cli(with({"tune"}, {"--sigma", "20", "--max-evals", "40", "--out",
                                  (dir / "tu").string()}))
              .code == cli::kExitOk);
  const json tr = read_json(dir / "tu" / "tune_result.json");
  CHECK(tr["evaluations"].get<long>() <= 40);
  CHECK(tr["trace"].size() >= 1);
  CHECK(fs::exists(dir / "tu" / "trace.csv"));
  CHECK(run_cli({"replay", "--manifest", (dir / "tu" / "manifest.json").string(),
                 "--scratch", (dir / "scratch").string()})
            .code == cli::kExitOk);

  REQUIRE(run_cli(with({"eval"}, {"--sigmas", "20", "--out", (dir / "ev").string()}))
              .code == cli::kExitOk);
  std::ifstream ev(dir / "ev" / "eval.csv");
  int lines = 0;
  for (std::string line; std::getline(ev, line);) ++lines;
  CHECK(lines == 4);
}

}  // namespace
}  // namespace bayerpipe
