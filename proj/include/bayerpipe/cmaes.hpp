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

#ifndef BAYERPIPE_CMAES_HPP_
#define BAYERPIPE_CMAES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace bayerpipe {

struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const noexcept { return lower.size(); }
  // Throws ParameterError unless both vectors are non-empty, equally long,
  // finite, and lower < upper everywhere.
  void validate() const;
};

// (mu/mu_w, lambda)-CMA-ES settings. Internally every dimension is mapped
// to [0, 1] by its box, so the step size is a fraction of the box width.
struct CmaConfig {
  // 0 selects 4 + floor(3 ln n).
  int population = 0;
  // 0 selects floor(population / 2).
  int parents = 0;
  double initial_step = 0.3;
  // Empty selects the box center. Given in the caller's coordinates.
  std::vector<double> initial_mean;
  long max_evaluations = 10000;
  // Stop once the best-so-far score improved by less than the tolerance
  // over this many generations.
  int stagnation_window = 20;
  double stagnation_tolerance = 1e-4;
  std::uint64_t seed = 0;
  // Candidate evaluations run on up to this many threads.
  int jobs = 1;
};

enum class Termination { kMaxEvaluations, kStagnation };

std::string_view termination_name(Termination t) noexcept;

struct GenerationRecord {
  long evaluations = 0;  // cumulative, after this generation
  double best = 0.0;     // best score so far
  double mean = 0.0;     // mean score of this generation's candidates
};

struct TuneResult {
  std::vector<double> best_params;
  double best_value = 0.0;
  std::vector<GenerationRecord> trace;
  Termination reason = Termination::kMaxEvaluations;
  long evaluations = 0;
};

// Scores a parameter vector; larger is better. Must be safe to call
// concurrently when CmaConfig::jobs > 1.
using Objective = std::function<double(std::span<const double>)>;
// Sees every clamped candidate, in sampling order, before it is scored.
using CandidateObserver = std::function<void(std::span<const double>)>;

// Maximizes `objective` over the box. Candidates are clamped into the box
// before evaluation; only the ranking of their scores drives the update, so
// any strictly increasing transform of the objective gives the same
// candidate sequence. NaN scores rank last. Throws DomainError if a whole
// generation scores NaN.
TuneResult cmaes_maximize(const Objective& objective, const BoxBounds& bounds,
                          const CmaConfig& cfg,
                          const CandidateObserver& observer = {});

}  // namespace bayerpipe

#endif  // BAYERPIPE_CMAES_HPP_
