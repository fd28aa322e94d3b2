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

#include "dpmean/symmetric.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpmean/mechanisms.h"
#include "dpmean/noise.h"

namespace dpmean {
namespace {

constexpr double kMaxBinMagnitude = 4.0e18;
constexpr int kMaxFixedPointIterations = 100;

}  // namespace

absl::StatusOr<CoarseParams> CoarseParams::Create(double epsilon,
                                                  double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return CoarseParams{epsilon, delta, 2 + 2 * std::log(1 / delta) / epsilon};
}

absl::StatusOr<int64_t> RoundHalfOpen(double x) {
  if (!std::isfinite(x) || std::abs(x) > kMaxBinMagnitude) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot assign a bin to ", x));
  }
  const double floor = std::floor(x);
  int64_t k = static_cast<int64_t>(floor);
  // x - floor(x) is exact, so the boundary x = k + 1/2 lands in bin k + 1.
  if (x - floor >= 0.5) ++k;
  return k;
}

absl::StatusOr<EstimateOutcome> CoarseEstimateAtOffset(
    std::span<const double> data, const CoarseParams& params, double offset,
    NoiseSource& source) {
  const PrivacyBudget budget{params.epsilon, params.delta};
  if (data.empty()) return EstimateOutcome{std::nullopt, budget};

  std::map<int64_t, int64_t> counts;
  for (double x : data) {
    absl::StatusOr<int64_t> bin = RoundHalfOpen(x - offset);
    if (!bin.ok()) return bin.status();
    ++counts[*bin];
  }

  const double scale = 2 / params.epsilon;
  int64_t best_bin = 0;
  double best_count = -INFINITY;
  for (const auto& [bin, count] : counts) {
    const double noisy = static_cast<double>(count) + source.Laplace(scale);
    if (noisy > best_count) {
      best_count = noisy;
      best_bin = bin;
    }
  }
  if (best_count <= params.threshold) {
    return EstimateOutcome{std::nullopt, budget};
  }
  return EstimateOutcome{offset + static_cast<double>(best_bin), budget};
}

absl::StatusOr<EstimateOutcome> CoarseEstimate(std::span<const double> data,
                                               const CoarseParams& params,
                                               NoiseSource& source) {
  const double offset = UniformOffsetSample(source);
  return CoarseEstimateAtOffset(data, params, offset, source);
}

absl::StatusOr<EstimateOutcome> KvCoarseEstimate(std::span<const double> data,
                                                 const CoarseParams& params,
                                                 NoiseSource& source) {
  return CoarseEstimateAtOffset(data, params, 0.0, source);
}

absl::StatusOr<int64_t> CoarseSampleSize(double epsilon, double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  const double gamma = delta * delta;
  const double fixed_terms = std::max(7 + 7 * std::log(1 / delta) / epsilon,
                                      128 * std::log(2 / gamma));
  double n1 = 16;
  for (int i = 0; i < kMaxFixedPointIterations; ++i) {
    const double next = std::ceil(std::max(
        fixed_terms, (16 / epsilon) * std::log(n1 / gamma)));
    if (next == n1) return static_cast<int64_t>(n1);
    n1 = next;
  }
  return absl::InternalError(absl::StrCat(
      "coarse sample size did not converge for epsilon=", epsilon,
      " delta=", delta));
}

absl::StatusOr<FineParams> DefaultFineParams(int64_t n, double epsilon,
                                             double delta, double psi,
                                             double lambda) {
  if (!(psi > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("psi must be positive, got ", psi));
  }
  if (!(lambda > 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must exceed 1, got ", lambda));
  }
  absl::StatusOr<int64_t> n1 = CoarseSampleSize(epsilon, delta);
  if (!n1.ok()) return n1.status();
  if (*n1 >= n) {
    return absl::FailedPreconditionError(absl::StrCat(
        "n=", n, " is too small: the coarse stage alone needs ", *n1,
        " points"));
  }
  FineParams params;
  params.epsilon = epsilon;
  params.delta = delta;
  params.sigma = 10;
  params.n1 = *n1;
  params.n2 = n - *n1;
  params.c = params.sigma +
             psi * std::pow(static_cast<double>(params.n2) * epsilon,
                            1 / lambda);
  return params;
}

double GaussianMomentOrder(int64_t n) {
  return std::max(2.0, std::ceil(std::log(static_cast<double>(n))));
}

absl::StatusOr<FineParams> GaussianDefaults(int64_t n, double epsilon,
                                            double delta) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be positive, got ", n));
  }
  const double lambda = GaussianMomentOrder(n);
  return DefaultFineParams(n, epsilon, delta, std::sqrt(lambda), lambda);
}

absl::StatusOr<EstimateOutcome> FineEstimate(std::span<const double> data,
                                             const FineParams& params,
                                             NoiseSource& source,
                                             CoarseBins bins) {
  if (params.n1 < 1 || params.n2 < 1) {
    return absl::InvalidArgumentError("n1 and n2 must both be positive");
  }
  if (static_cast<int64_t>(data.size()) != params.n1 + params.n2) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected n1 + n2 = ", params.n1 + params.n2,
                     " points, got ", data.size()));
  }
  if (!(params.c > 0) || !(params.sigma > 0)) {
    return absl::InvalidArgumentError("c and sigma must be positive");
  }
  absl::StatusOr<CoarseParams> coarse_params =
      CoarseParams::Create(params.epsilon, params.delta);
  if (!coarse_params.ok()) return coarse_params.status();

  std::vector<double> scaled(data.begin(), data.begin() + params.n1);
  for (double& x : scaled) x /= params.sigma;
  std::unique_ptr<NoiseSource> coarse_source = source.Split(0);
  absl::StatusOr<EstimateOutcome> coarse =
      bins == CoarseBins::kRandomOffset
          ? CoarseEstimate(scaled, *coarse_params, *coarse_source)
          : KvCoarseEstimate(scaled, *coarse_params, *coarse_source);
  if (!coarse.ok()) return coarse.status();

  const std::span<const double> second = data.subspan(params.n1);
  const double n2 = static_cast<double>(params.n2);
  const PrivacyBudget budget{params.epsilon, params.delta};
  std::unique_ptr<NoiseSource> fine_source = source.Split(1);
  if (coarse->failed()) {
    double sum = 0.0;
    for (double x : second) {
      if (fine_source->Bernoulli(params.delta)) sum += x;
    }
    return EstimateOutcome{sum / (n2 * params.delta), budget};
  }
  const double center = params.sigma * *coarse->value;
  const double clipped =
      ClippedMean(second, center - params.c, center + params.c);
  const double noise = fine_source->Laplace(2 * params.c / (n2 * params.epsilon));
  return EstimateOutcome{clipped + noise, budget};
}

absl::StatusOr<EstimateOutcome> KvFineEstimate(std::span<const double> data,
                                               const FineParams& params,
                                               NoiseSource& source) {
  return FineEstimate(data, params, source, CoarseBins::kFixed);
}

}  // namespace dpmean
