//
// Copyright 2026 The dpmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpmean/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpmean/noise.h"

namespace dpmean {
namespace {

absl::Status CheckEpsilon(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  return absl::OkStatus();
}

absl::Status CheckNonEmpty(std::span<const double> data) {
  if (data.empty()) {
    return absl::InvalidArgumentError("data must contain at least one point");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!(epsilon >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be non-negative, got ", epsilon));
  }
  if (!(delta >= 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  return PrivacyBudget{epsilon, delta};
}

absl::StatusOr<MomentModel> MomentModel::Create(double a, double b,
                                                double lambda, double psi) {
  if (!(a <= b)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mean range requires a <= b, got [", a, ", ", b, "]"));
  }
  if (!(lambda > 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("moment order lambda must exceed 1, got ", lambda));
  }
  if (!(psi > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("moment bound psi must be positive, got ", psi));
  }
  return MomentModel{a, b, lambda, psi};
}

absl::StatusOr<double> Clip(double x, double a, double b) {
  if (!(a <= b)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip requires a <= b, got [", a, ", ", b, "]"));
  }
  return std::min(std::max(x, a), b);
}

absl::StatusOr<double> ClipBiasBound(double lambda, double moment,
                                     double gap) {
  if (!(lambda > 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must exceed 1, got ", lambda));
  }
  if (!(moment >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("moment must be non-negative, got ", moment));
  }
  if (!(gap > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gap must be positive, got ", gap));
  }
  const double constant =
      std::pow(lambda - 1, lambda - 1) / std::pow(lambda, lambda);
  return constant * moment / std::pow(gap, lambda - 1);
}

double ClippedMean(std::span<const double> data, double lo, double hi) {
  if (data.empty()) return 0.0;
  double sum = 0.0;
  for (double x : data) sum += std::min(std::max(x, lo), hi);
  return sum / static_cast<double>(data.size());
}

double ClipWidening(double lambda, double beta) {
  return std::pow(beta, -1.0 / (lambda - 1));
}

absl::StatusOr<EstimateOutcome> ClippedMeanLaplace(std::span<const double> data,
                                                   const MomentModel& model,
                                                   double epsilon, double beta,
                                                   NoiseSource& source) {
  if (absl::Status s = CheckNonEmpty(data); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (!(beta > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive, got ", beta));
  }
  const double widening = ClipWidening(model.lambda, beta);
  const double lo = model.a - widening;
  const double hi = model.b + widening;
  const double n = static_cast<double>(data.size());
  absl::StatusOr<double> noise = LaplaceSample((hi - lo) / (epsilon * n), source);
  if (!noise.ok()) return noise.status();
  return EstimateOutcome{ClippedMean(data, lo, hi) + *noise,
                         PrivacyBudget{epsilon, 0.0}};
}

absl::StatusOr<EstimateOutcome> ThresholdClippedMean(
    std::span<const double> data, double threshold, double epsilon,
    NoiseSource& source) {
  if (absl::Status s = CheckNonEmpty(data); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (!(threshold > 0) || !std::isfinite(threshold)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clipping threshold must be finite and positive, got ", threshold));
  }
  const double n = static_cast<double>(data.size());
  const double noise = source.Laplace(threshold / (epsilon * n));
  return EstimateOutcome{ClippedMean(data, 0.0, threshold) + noise,
                         PrivacyBudget{epsilon, 0.0}};
}

absl::StatusOr<EstimateOutcome> NameAndShameMean(std::span<const double> data,
                                                 double delta,
                                                 NoiseSource& source) {
  if (absl::Status s = CheckNonEmpty(data); !s.ok()) return s;
  if (!(delta > 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1], got ", delta));
  }
  double sum = 0.0;
  for (double x : data) {
    if (source.Bernoulli(delta)) sum += x;
  }
  return EstimateOutcome{sum / (delta * static_cast<double>(data.size())),
                         PrivacyBudget{0.0, delta}};
}

double NameAndShameMse(double variance, double mean, double delta, int64_t n) {
  return (variance + (1 - delta) * mean * mean) /
         (delta * static_cast<double>(n));
}

absl::StatusOr<double> CombinedClipRadius(int64_t n, double epsilon,
                                          double delta, double psi,
                                          double lambda) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be positive, got ", n));
  }
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (!(delta > 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1], got ", delta));
  }
  if (!(lambda > 2)) {
    return absl::InvalidArgumentError(
        absl::StrCat("the combined mechanism needs lambda > 2, got ", lambda));
  }
  if (!(psi > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("psi must be positive, got ", psi));
  }
  const double inner = static_cast<double>(n) * epsilon * epsilon *
                       std::pow(psi, lambda) * (lambda - 2) /
                       (4 * lambda * lambda * delta);
  return std::pow(inner, 1 / lambda);
}

absl::StatusOr<EstimateOutcome> CombinedUnbiasedMean(
    std::span<const double> data, const MomentModel& model,
    const PrivacyBudget& budget, NoiseSource& source) {
  if (absl::Status s = CheckNonEmpty(data); !s.ok()) return s;
  const int64_t n = static_cast<int64_t>(data.size());
  absl::StatusOr<double> radius = CombinedClipRadius(
      n, budget.epsilon, budget.delta, model.psi, model.lambda);
  if (!radius.ok()) return radius.status();
  const double lo = model.a - *radius;
  const double hi = model.b + *radius;

  const double head = ClippedMean(data, lo, hi) +
                      source.Laplace((hi - lo) / (static_cast<double>(n) *
                                                  budget.epsilon));
  double tail = 0.0;
  for (double x : data) {
    const double residual = x - std::min(std::max(x, lo), hi);
    if (residual != 0.0 && source.Bernoulli(budget.delta)) tail += residual;
  }
  tail /= budget.delta * static_cast<double>(n);
  return EstimateOutcome{head + tail, budget};
}

double CombinedMseBound(int64_t n, double epsilon, double delta,
                        const MomentModel& model) {
  const double nd = static_cast<double>(n);
  const double ne2 = nd * nd * epsilon * epsilon;
  const double width = model.b - model.a;
  return 2 / nd + 4 * width * width / ne2 +
         (24 * model.psi * model.psi / ne2) *
             std::pow(nd * epsilon * epsilon / (4 * model.lambda * delta),
                      2 / model.lambda);
}

absl::StatusOr<std::vector<std::vector<double>>> ShuffleBlockRows(
    const std::vector<std::vector<double>>& blocks, NoiseSource& source) {
  if (blocks.empty()) {
    return absl::InvalidArgumentError("at least one block is required");
  }
  const size_t n = blocks.front().size();
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != n) {
      return absl::InvalidArgumentError(
          absl::StrCat("block ", i, " has size ", blocks[i].size(),
                       ", expected ", n));
    }
  }
  std::vector<std::vector<double>> shuffled = blocks;
  const size_t m = blocks.size();
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = m - 1; i > 0; --i) {
      const size_t k = source.UniformIndex(i + 1);
      std::swap(shuffled[i][j], shuffled[k][j]);
    }
  }
  return shuffled;
}

absl::StatusOr<EstimateOutcome> BlockAverageEstimator(
    const MeanMechanism& inner, const std::vector<std::vector<double>>& blocks,
    bool shuffle, NoiseSource& source) {
  std::unique_ptr<NoiseSource> shuffle_source = source.Split(0);
  absl::StatusOr<std::vector<std::vector<double>>> arranged =
      ShuffleBlockRows(blocks, *shuffle_source);
  if (!arranged.ok()) return arranged.status();
  const std::vector<std::vector<double>>& input = shuffle ? *arranged : blocks;

  double sum = 0.0;
  bool failed = false;
  PrivacyBudget budget;
  for (size_t i = 0; i < input.size(); ++i) {
    std::unique_ptr<NoiseSource> block_source = source.Split(i + 1);
    absl::StatusOr<EstimateOutcome> outcome = inner(input[i], *block_source);
    if (!outcome.ok()) return outcome.status();
    budget.epsilon = std::max(budget.epsilon, outcome->budget.epsilon);
    budget.delta = std::max(budget.delta, outcome->budget.delta);
    if (outcome->failed()) {
      failed = true;
    } else {
      sum += *outcome->value;
    }
  }
  if (failed) return EstimateOutcome{std::nullopt, budget};
  return EstimateOutcome{sum / static_cast<double>(input.size()), budget};
}

}  // namespace dpmean
