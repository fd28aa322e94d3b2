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

#ifndef DPMEAN_SYMMETRIC_H_
#define DPMEAN_SYMMETRIC_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "dpmean/mechanisms.h"
#include "dpmean/noise.h"

namespace dpmean {

struct CoarseParams {
  double epsilon = 1.0;
  double delta = 0.01;
  // A bin is released only if its noisy count exceeds this value.
  double threshold = 0.0;

  // Sets threshold = 2 + 2 ln(1/delta) / epsilon.
  static absl::StatusOr<CoarseParams> Create(double epsilon, double delta);
};

// The unique integer k with x in [k - 1/2, k + 1/2).
absl::StatusOr<int64_t> RoundHalfOpen(double x);

// Stable histogram over the bins [k - 1/2 + offset, k + 1/2 + offset). One
// Laplace(2/epsilon) draw is taken per occupied bin in ascending bin order,
// and ties in the noisy argmax go to the smaller bin. Returns offset + k for
// the winning bin, or a failed outcome if no noisy count clears the
// threshold. Empty input fails without consuming noise.
absl::StatusOr<EstimateOutcome> CoarseEstimateAtOffset(
    std::span<const double> data, const CoarseParams& params, double offset,
    NoiseSource& source);

// Draws the offset uniformly from [-1/2, 1/2), then runs
// CoarseEstimateAtOffset with the same source.
absl::StatusOr<EstimateOutcome> CoarseEstimate(std::span<const double> data,
                                               const CoarseParams& params,
                                               NoiseSource& source);

// Fixed bins centered on the integers (offset 0).
absl::StatusOr<EstimateOutcome> KvCoarseEstimate(std::span<const double> data,
                                                 const CoarseParams& params,
                                                 NoiseSource& source);

struct FineParams {
  double epsilon = 1.0;
  double delta = 0.01;
  // Half-width of the clipping window around the coarse estimate.
  double c = 1.0;
  // Bin width of the coarse stage.
  double sigma = 1.0;
  int64_t n1 = 0;
  int64_t n2 = 0;
};

// Smallest fixed point of
//   n1 = ceil(max{7 + 7 ln(1/delta)/eps, 128 ln(2/gamma), (16/eps) ln(n1/gamma)})
// reached from n1 = 16, with gamma = delta^2.
absl::StatusOr<int64_t> CoarseSampleSize(double epsilon, double delta);

// gamma = delta^2, sigma = 10, n1 = CoarseSampleSize, n2 = n - n1 and
// c = sigma + psi (n2 eps)^{1/lambda}.
absl::StatusOr<FineParams> DefaultFineParams(int64_t n, double epsilon,
                                             double delta, double psi,
                                             double lambda);

// max(2, ceil(ln n)).
double GaussianMomentOrder(int64_t n);

// DefaultFineParams with lambda = GaussianMomentOrder(n) and psi = sqrt(lambda).
absl::StatusOr<FineParams> GaussianDefaults(int64_t n, double epsilon,
                                            double delta);

enum class CoarseBins { kRandomOffset, kFixed };

// Coarse stage on x_1..x_{n1} scaled by 1/sigma (noise from source.Split(0)),
// then a clipped Laplace mean of x_{n1+1}..x_{n1+n2} around the coarse
// estimate (noise from source.Split(1)). If the coarse stage fails, the
// second half is averaged with name-and-shame instead. Unbiased for
// symmetric populations when bins are randomly offset.
absl::StatusOr<EstimateOutcome> FineEstimate(
    std::span<const double> data, const FineParams& params, NoiseSource& source,
    CoarseBins bins = CoarseBins::kRandomOffset);

absl::StatusOr<EstimateOutcome> KvFineEstimate(std::span<const double> data,
                                               const FineParams& params,
                                               NoiseSource& source);

}  // namespace dpmean

#endif  // DPMEAN_SYMMETRIC_H_
