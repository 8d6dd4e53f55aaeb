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

#include "bayerpipe/cmaes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "bayerpipe/error.hpp"
#include "bayerpipe/noise.hpp"

namespace bayerpipe {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Strategy {
  int n = 0;
  int lambda = 0;
  int mu = 0;
  VectorXd weights;
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;
};

Strategy make_strategy(int n, const CmaConfig& cfg) {
  Strategy s;
  s.n = n;
  s.lambda = cfg.population > 0
                 ? cfg.population
                 : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  s.mu = cfg.parents > 0 ? cfg.parents : s.lambda / 2;
  if (s.lambda < 2 || s.mu < 1 || s.mu > s.lambda) {
    throw ParameterError("CMA-ES needs population >= 2 and 1 <= parents <= "
                         "population");
  }
  s.weights.resize(s.mu);
  for (int i = 0; i < s.mu; ++i) {
    s.weights[i] = std::log(s.mu + 0.5) - std::log(i + 1.0);
  }
  s.weights /= s.weights.sum();
  s.mu_eff = 1.0 / s.weights.squaredNorm();

  const double nd = n;
  s.c_sigma = (s.mu_eff + 2.0) / (nd + s.mu_eff + 5.0);
  s.d_sigma = 1.0 +
              2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (nd + 1.0)) - 1.0) +
              s.c_sigma;
  s.c_c = (4.0 + s.mu_eff / nd) / (nd + 4.0 + 2.0 * s.mu_eff / nd);
  s.c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + s.mu_eff);
  s.c_mu = std::min(1.0 - s.c_1, 2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) /
                                     ((nd + 2.0) * (nd + 2.0) + s.mu_eff));
  s.chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  return s;
}

// Larger is better; NaN is worse than everything.
bool ranks_before(double a, double b) {
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return a > b;
}

void evaluate_all(const Objective& objective,
                  const std::vector<std::vector<double>>& candidates,
                  std::vector<double>& scores, int jobs) {
  const std::size_t count = candidates.size();
  if (jobs <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) scores[k] = objective(candidates[k]);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += workers) {
          scores[k] = objective(candidates[k]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

void BoxBounds::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw ParameterError("box bounds must be non-empty and equally sized");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) ||
        !(lower[i] < upper[i])) {
      throw ParameterError("box bound " + std::to_string(i) +
                           " needs finite lower < upper");
    }
  }
}

std::string_view termination_name(Termination t) noexcept {
  return t == Termination::kMaxEvaluations ? "max_evals" : "stagnation";
}

TuneResult cmaes_maximize(const Objective& objective, const BoxBounds& bounds,
                          const CmaConfig& cfg,
                          const CandidateObserver& observer) {
  bounds.validate();
  if (!(cfg.initial_step > 0.0)) {
    throw ParameterError("CMA-ES initial step must be > 0");
  }
  if (cfg.max_evaluations <= 0 || cfg.stagnation_window <= 0) {
    throw ParameterError("CMA-ES evaluation budget and window must be > 0");
  }
  const int n = static_cast<int>(bounds.dimension());
  const Strategy s = make_strategy(n, cfg);

  VectorXd lower(n), width(n);
  for (int i = 0; i < n; ++i) {
    lower[i] = bounds.lower[i];
    width[i] = bounds.upper[i] - bounds.lower[i];
  }

  // State lives in unit-box coordinates.
  VectorXd mean = VectorXd::Constant(n, 0.5);
  if (!cfg.initial_mean.empty()) {
    if (static_cast<int>(cfg.initial_mean.size()) != n) {
      throw ParameterError("CMA-ES initial mean has the wrong dimension");
    }
    for (int i = 0; i < n; ++i) {
      mean[i] = (cfg.initial_mean[i] - lower[i]) / width[i];
    }
  }
  double sigma = cfg.initial_step;
  MatrixXd cov = MatrixXd::Identity(n, n);
  MatrixXd basis = MatrixXd::Identity(n, n);
  VectorXd scale = VectorXd::Ones(n);
  VectorXd path_sigma = VectorXd::Zero(n);
  VectorXd path_c = VectorXd::Zero(n);

  RngStream rng(cfg.seed);
  TuneResult result;
  result.best_value = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  std::vector<VectorXd> samples(s.lambda);
  std::vector<std::vector<double>> candidates(s.lambda, std::vector<double>(n));
  std::vector<double> scores(s.lambda);
  std::vector<int> order(s.lambda);

  for (long generation = 0;; ++generation) {
    if (result.evaluations + s.lambda > cfg.max_evaluations) {
      result.reason = Termination::kMaxEvaluations;
      break;
    }

    for (int k = 0; k < s.lambda; ++k) {
      VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = rng.normal();
      samples[k] = mean + sigma * (basis * scale.cwiseProduct(z));
      // The clamped point replaces the sample, so the mean cannot leave the
      // box and stall where every candidate lands on the same corner.
      for (int i = 0; i < n; ++i) {
        samples[k][i] = std::clamp(samples[k][i], 0.0, 1.0);
        candidates[k][i] = std::clamp(lower[i] + samples[k][i] * width[i],
                                      bounds.lower[i], bounds.upper[i]);
      }
      if (observer) observer(candidates[k]);
    }
    evaluate_all(objective, candidates, scores, cfg.jobs);
    result.evaluations += s.lambda;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return ranks_before(scores[a], scores[b]);
    });
    if (std::isnan(scores[order[0]])) {
      throw DomainError("objective returned NaN for every candidate of "
                        "generation " + std::to_string(generation));
    }

    double sum = 0.0;
    int finite = 0;
    for (double v : scores) {
      if (!std::isnan(v)) {
        sum += v;
        ++finite;
      }
    }
    const double leader = scores[order[0]];
    if (!have_best || leader > result.best_value) {
      result.best_value = leader;
      result.best_params = candidates[order[0]];
      have_best = true;
    }
    result.trace.push_back({result.evaluations, result.best_value,
                            sum / static_cast<double>(finite)});

    // Recombination and evolution paths.
    const VectorXd old_mean = mean;
    mean.setZero();
    for (int i = 0; i < s.mu; ++i) mean += s.weights[i] * samples[order[i]];
    const VectorXd step = (mean - old_mean) / sigma;

    const VectorXd inv_sqrt_step =
        basis * (basis.transpose() * step).cwiseQuotient(scale);
    path_sigma = (1.0 - s.c_sigma) * path_sigma +
                 std::sqrt(s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff) *
                     inv_sqrt_step;
    const double ps_norm = path_sigma.norm();
    const double decay =
        1.0 - std::pow(1.0 - s.c_sigma, 2.0 * static_cast<double>(generation + 1));
    const bool hsig = ps_norm / std::sqrt(decay) / s.chi_n < 1.4 + 2.0 / (n + 1.0);
    path_c = (1.0 - s.c_c) * path_c;
    if (hsig) path_c += std::sqrt(s.c_c * (2.0 - s.c_c) * s.mu_eff) * step;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < s.mu; ++i) {
      const VectorXd y = (samples[order[i]] - old_mean) / sigma;
      rank_mu += s.weights[i] * y * y.transpose();
    }
    const double lost = hsig ? 0.0 : s.c_c * (2.0 - s.c_c);
    cov = (1.0 - s.c_1 - s.c_mu) * cov +
          s.c_1 * (path_c * path_c.transpose() + lost * cov) + s.c_mu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    const bool healthy = eig.info() == Eigen::Success &&
                         eig.eigenvalues().allFinite() &&
                         eig.eigenvalues().minCoeff() > 0.0 &&
                         std::isfinite(sigma) && sigma > 0.0;
    if (!healthy) {
      result.reason = Termination::kStagnation;
      break;
    }
    basis = eig.eigenvectors();
    scale = eig.eigenvalues().cwiseSqrt();

    const std::size_t g = result.trace.size();
    const auto window = static_cast<std::size_t>(cfg.stagnation_window);
    if (g > window) {
      const double gain = result.trace[g - 1].best - result.trace[g - 1 - window].best;
      // inf - inf is NaN: an unbounded score cannot improve further.
      if (std::isnan(gain) || gain < cfg.stagnation_tolerance) {
        result.reason = Termination::kStagnation;
        break;
      }
    }
  }
  return result;
}

}  // namespace bayerpipe
