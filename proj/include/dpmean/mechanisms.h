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

#ifndef DPMEAN_MECHANISMS_H_
#define DPMEAN_MECHANISMS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmean/noise.h"

namespace dpmean {

// (epsilon, delta) guarantee attached to a release.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);
};

// Declared distributional assumptions: the mean lies in [a, b] and the
// central moment of order lambda is at most psi^lambda. These are model
// inputs and are never checked against data.
struct MomentModel {
  double a = 0.0;
  double b = 0.0;
  double lambda = 2.0;
  double psi = 1.0;

  static absl::StatusOr<MomentModel> Create(double a, double b, double lambda,
                                            double psi);
};

// A released value, or nullopt for the failure symbol, together with the
// budget the mechanism guarantees.
struct EstimateOutcome {
  std::optional<double> value;
  PrivacyBudget budget;

  bool failed() const { return !value.has_value(); }
};

using MeanMechanism = std::function<absl::StatusOr<EstimateOutcome>(
    std::span<const double>, NoiseSource&)>;

absl::StatusOr<double> Clip(double x, double a, double b);

// Upper bound on |E[clip(X)] - E[X]| when the moment of order lambda is at
// most `moment` and the clipping interval leaves `gap` on each side of the
// mean.
absl::StatusOr<double> ClipBiasBound(double lambda, double moment, double gap);

// Mean of clip_{[lo, hi]}(x_i) with no noise. Used by the mechanisms and by
// sensitivity tests.
double ClippedMean(std::span<const double> data, double lo, double hi);

// beta^{-1/(lambda-1)}: how far the clipped-mean mechanism widens [a, b] so
// that clipping bias stays below beta.
double ClipWidening(double lambda, double beta);

// Pure DP clipped mean: clips to [a - w, b + w] with w = ClipWidening and adds
// Laplace noise of scale (b - a + 2w) / (epsilon n). Budget (epsilon, 0).
absl::StatusOr<EstimateOutcome> ClippedMeanLaplace(std::span<const double> data,
                                                   const MomentModel& model,
                                                   double epsilon, double beta,
                                                   NoiseSource& source);

// Clips non-negative data to [0, threshold] and adds Laplace noise of scale
// threshold / (epsilon n). Budget (epsilon, 0).
absl::StatusOr<EstimateOutcome> ThresholdClippedMean(
    std::span<const double> data, double threshold, double epsilon,
    NoiseSource& source);

// Releases each x_i / delta with probability delta, else 0, and averages.
// Unbiased. Budget (0, delta).
absl::StatusOr<EstimateOutcome> NameAndShameMean(std::span<const double> data,
                                                 double delta,
                                                 NoiseSource& source);

// Exact MSE of NameAndShameMean on n i.i.d. draws with the given population
// variance and mean.
double NameAndShameMse(double variance, double mean, double delta, int64_t n);

// Clip radius c = (n eps^2 psi^lambda (lambda - 2) / (4 lambda^2 delta))^{1/lambda}.
absl::StatusOr<double> CombinedClipRadius(int64_t n, double epsilon,
                                          double delta, double psi,
                                          double lambda);

// Unbiased (epsilon, delta) estimator: Laplace clipped mean on [a - c, b + c]
// plus name-and-shame on the clipping residuals.
absl::StatusOr<EstimateOutcome> CombinedUnbiasedMean(
    std::span<const double> data, const MomentModel& model,
    const PrivacyBudget& budget, NoiseSource& source);

// 2/n + 4(b-a)^2/(n eps)^2 + 24 psi^2/(n eps)^2 (n eps^2/(4 lambda delta))^{2/lambda}.
double CombinedMseBound(int64_t n, double epsilon, double delta,
                        const MomentModel& model);

// Applies the row-wise shuffle: for every row index j, the entries
// blocks[0][j], ..., blocks[m-1][j] are permuted uniformly and independently.
absl::StatusOr<std::vector<std::vector<double>>> ShuffleBlockRows(
    const std::vector<std::vector<double>>& blocks, NoiseSource& source);

// Mean of inner(block_i) over m equal-sized blocks, optionally after
// ShuffleBlockRows. Block i runs on source.Split(i + 1); the shuffle draws
// from source.Split(0). Fails if any inner call fails.
absl::StatusOr<EstimateOutcome> BlockAverageEstimator(
    const MeanMechanism& inner, const std::vector<std::vector<double>>& blocks,
    bool shuffle, NoiseSource& source);

}  // namespace dpmean

#endif  // DPMEAN_MECHANISMS_H_
