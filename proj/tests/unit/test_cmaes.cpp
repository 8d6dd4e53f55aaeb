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


#include <cmath>
#include <limits>
#include <vector>

#include "bayerpipe/cmaes.hpp"
#include "bayerpipe/error.hpp"
#include "doctest.h"

namespace bayerpipe {
namespace {

double sphere(std::span<const double> x) {
  double f = 0;
  for (double v : x) f += v * v;
  return f;
}

BoxBounds cube(int n, double lo, double hi) {
  return BoxBounds{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

std::vector<std::vector<double>> visited(const Objective& f, const BoxBounds& b,
                                         const CmaConfig& cfg) {
  std::vector<std::vector<double>> seen;
  cmaes_maximize(f, b, cfg, [&](std::span<const double> x) {
    seen.emplace_back(x.begin(), x.end());
  });
  return seen;
}

TEST_CASE("bounds and config validation") {
  auto f = [](std::span<const double>) { return 0.0; };
  CHECK_THROWS_AS(cmaes_maximize(f, BoxBounds{}, {}), ParameterError);
  CHECK_THROWS_AS(cmaes_maximize(f, BoxBounds{{0, 1}, {1}}, {}), ParameterError);
  CHECK_THROWS_AS(cmaes_maximize(f, BoxBounds{{1}, {1}}, {}), ParameterError);
  CmaConfig cfg;
  cfg.initial_step = 0;
  CHECK_THROWS_AS(cmaes_maximize(f, cube(2, 0, 1), cfg), ParameterError);
  cfg = {};
  cfg.population = 1;
  CHECK_THROWS_AS(cmaes_maximize(f, cube(2, 0, 1), cfg), ParameterError);
  cfg = {};
  cfg.population = 4;
  cfg.parents = 5;
  CHECK_THROWS_AS(cmaes_maximize(f, cube(2, 0, 1), cfg), ParameterError);
  cfg = {};
  cfg.initial_mean = {0.5};
  CHECK_THROWS_AS(cmaes_maximize(f, cube(2, 0, 1), cfg), ParameterError);
  CHECK(termination_name(Termination::kMaxEvaluations) == "max_evals");
  CHECK(termination_name(Termination::kStagnation) == "stagnation");
}

TEST_CASE("sphere converges") {
  CmaConfig cfg;
  cfg.seed = 1;
  cfg.max_evaluations = 6000;
  cfg.stagnation_tolerance = 0;
  TuneResult r = cmaes_maximize([](std::span<const double> x) { return -sphere(x); },
                                cube(5, -5, 5), cfg);
  CHECK(-r.best_value < 1e-10);
  CHECK(r.evaluations <= cfg.max_evaluations);
  CHECK(r.reason == Termination::kMaxEvaluations);
}

TEST_CASE("edge optimum matches a grid oracle") {
  auto f = [](std::span<const double> x) { return -(x[0] - 7.0) * (x[0] - 7.0); };
  double grid_best = 0, grid_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 100000; ++k) {
    const double x = 5.0 * k / 100000;
    const double v = f(std::span<const double>(&x, 1));
    if (v > grid_value) {
      grid_value = v;
      grid_best = x;
    }
  }
  CmaConfig cfg;
  cfg.seed = 3;
  cfg.max_evaluations = 2000;
  TuneResult r = cmaes_maximize(f, cube(1, 0, 5), cfg);
  CHECK(std::abs(r.best_params[0] - grid_best) <= 1e-6);
  CHECK(r.best_value >= grid_value - 1e-9);
}

TEST_CASE("candidates stay inside the box") {
  CmaConfig cfg;
  cfg.seed = 4;
  cfg.initial_step = 2.0;
  cfg.max_evaluations = 600;
  BoxBounds b{{-1, 10, 0}, {1, 12, 1e-3}};
  for (const auto& x : visited([](std::span<const double> x) { return x[0]; }, b, cfg))
    for (int i = 0; i < 3; ++i) {
      CHECK(x[i] >= b.lower[i]);
      CHECK(x[i] <= b.upper[i]);
    }
}

TEST_CASE("monotone transforms do not change the candidate sequence") {
  CmaConfig cfg;
  cfg.seed = 9;
  cfg.max_evaluations = 800;
  cfg.stagnation_tolerance = 0;
  auto f = [](std::span<const double> x) { return -sphere(x) + x[1]; };
  auto g = [&](std::span<const double> x) { return std::exp(f(x)); };
  auto h = [&](std::span<const double> x) { return 3.0 * std::atan(f(x)) - 2.0; };
  BoxBounds b = cube(4, -2, 2);
  auto a = visited(f, b, cfg);
  CHECK(a == visited(g, b, cfg));
  CHECK(a == visited(h, b, cfg));
}

TEST_CASE("results are deterministic and independent of thread count") {
  CmaConfig cfg;
  cfg.seed = 21;
  cfg.max_evaluations = 500;
  auto f = [](std::span<const double> x) { return -sphere(x) + 0.1 * x[0]; };
  TuneResult a = cmaes_maximize(f, cube(3, -1, 1), cfg);
  TuneResult b = cmaes_maximize(f, cube(3, -1, 1), cfg);
  cfg.jobs = 3;
  TuneResult c = cmaes_maximize(f, cube(3, -1, 1), cfg);
  for (const TuneResult* r : {&b, &c}) {
    CHECK(r->best_params == a.best_params);
    CHECK(r->best_value == a.best_value);
    CHECK(r->trace.size() == a.trace.size());
    CHECK(r->evaluations == a.evaluations);
  }
  cfg.seed = 22;
  CHECK(cmaes_maximize(f, cube(3, -1, 1), cfg).best_params != a.best_params);
}

TEST_CASE("trace bookkeeping") {
  CmaConfig cfg;
  cfg.seed = 5;
  cfg.max_evaluations = 400;
  TuneResult r = cmaes_maximize([](std::span<const double> x) { return -sphere(x); },
                                cube(3, -3, 3), cfg);
  REQUIRE_FALSE(r.trace.empty());
  double best = -std::numeric_limits<double>::infinity();
  long prev_evals = 0;
  for (const GenerationRecord& g : r.trace) {
    CHECK(g.best >= best);
    CHECK(g.mean <= g.best);
    CHECK(g.evaluations > prev_evals);
    best = g.best;
    prev_evals = g.evaluations;
  }
  CHECK(r.best_value == best);
  CHECK(r.best_value == -sphere(r.best_params));
  CHECK(r.trace.back().evaluations == r.evaluations);
}

TEST_CASE("population defaults follow the dimension") {
  CmaConfig cfg;
  cfg.max_evaluations = 1;
  cfg.seed = 1;
  std::size_t seen = 0;
  cfg.max_evaluations = 10;
  cmaes_maximize([](std::span<const double>) { return 0.0; }, cube(10, 0, 1), cfg,
                 [&](std::span<const double>) { ++seen; });
  CHECK(seen == 10u);  // 4 + floor(3 ln 10) = 10, one generation fits
}

TEST_CASE("evaluation budget is never exceeded") {
  CmaConfig cfg;
  cfg.max_evaluations = 95;
  cfg.stagnation_tolerance = 0;
  long calls = 0;
  TuneResult r = cmaes_maximize(
      [&](std::span<const double> x) { ++calls; return -sphere(x); }, cube(2, -1, 1), cfg);
  CHECK(calls <= 95);
  CHECK(r.evaluations == calls);
  CHECK(r.reason == Termination::kMaxEvaluations);
}

TEST_CASE("flat objective stops by stagnation") {
  CmaConfig cfg;
  cfg.stagnation_window = 5;
  TuneResult r = cmaes_maximize([](std::span<const double>) { return 1.0; },
                                cube(2, 0, 1), cfg);
  CHECK(r.reason == Termination::kStagnation);
  CHECK(r.trace.size() == 6u);

  TuneResult inf = cmaes_maximize(
      [](std::span<const double>) { return std::numeric_limits<double>::infinity(); },
      cube(2, 0, 1), cfg);
  CHECK(inf.reason == Termination::kStagnation);
}

TEST_CASE("NaN scores rank last") {
  CmaConfig cfg;
  cfg.seed = 2;
  cfg.max_evaluations = 3000;
  cfg.stagnation_tolerance = 0;
  auto f = [](std::span<const double> x) {
    return x[0] < -0.5 ? std::numeric_limits<double>::quiet_NaN() : -sphere(x);
  };
  TuneResult r = cmaes_maximize(f, cube(2, -1, 1), cfg);
  CHECK(r.best_params[0] >= -0.5);
  CHECK(-r.best_value < 1e-8);

  auto all_nan = [](std::span<const double>) { return std::nan(""); };
  CHECK_THROWS_AS(cmaes_maximize(all_nan, cube(2, 0, 1), cfg), DomainError);
}

TEST_CASE("initial mean is honored") {
  CmaConfig cfg;
  cfg.initial_mean = {0.9};
  cfg.initial_step = 1e-6;
  cfg.max_evaluations = 4;
  std::vector<std::vector<double>> seen =
      visited([](std::span<const double> x) { return x[0]; }, cube(1, 0, 1), cfg);
  REQUIRE_FALSE(seen.empty());
  CHECK(seen[0][0] == doctest::Approx(0.9).epsilon(1e-4));
}

}  // namespace
}  // namespace bayerpipe
