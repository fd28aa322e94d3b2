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

#ifndef DPMEAN_UNKNOWN_SIZE_H_
#define DPMEAN_UNKNOWN_SIZE_H_

#include <cstdint>
#include <functional>
#include <span>

#include "absl/status/statusor.h"
#include "dpmean/mechanisms.h"
#include "dpmean/noise.h"

namespace dpmean {

// Private underestimate of a dataset size. Always n - 2 margin <= size <= n.
struct SizeEstimate {
  int64_t size = 0;
  int64_t margin = 0;
};

// v = ceil(ln(2/delta) / epsilon).
absl::StatusOr<int64_t> SizeMargin(double epsilon, double delta);

// size = n + clip_{[-v, v]}(Z) - v with Z discrete Laplace at epsilon. One
// discrete Laplace draw.
absl::StatusOr<SizeEstimate> PrivateSize(int64_t n, double epsilon,
                                         double delta, NoiseSource& source);

// Runs `family` (which must accept any input size >= min_size) on a uniformly
// random subset of PrivateSize(...) points, or fails when that size is below
// min_size. The size draw uses source.Split(0), the subset source.Split(1)
// and the family source.Split(2). The reported budget adds (epsilon, delta)
// to the family's own budget.
absl::StatusOr<EstimateOutcome> SizeObliviousWrap(const MeanMechanism& family,
                                                  std::span<const double> data,
                                                  double epsilon, double delta,
                                                  int64_t min_size,
                                                  NoiseSource& source);

// (b - a) / max(n, 1).
absl::StatusOr<double> MeanLocalSensitivity(int64_t n, double a, double b);

// (b - a) max(exp(-beta (n - 1)), 1 / max(n, 1)): a beta-smooth upper bound
// on the local sensitivity of the mean over [a, b].
absl::StatusOr<double> MeanSmoothSensitivity(int64_t n, double a, double b,
                                             double beta);

struct SmoothSensParams {
  double beta = 0.0;
  double tau = 0.0;
  int degrees_of_freedom = 3;

  // beta = eps / 12, tau = sqrt(3) / eps, three degrees of freedom.
  static absl::StatusOr<SmoothSensParams> ForEpsilon(double epsilon);
};

// Empirical mean (0 on empty input) plus tau S Z with Z ~ Student-t(3) and S
// the smooth sensitivity bound. Requires a <= 0 <= b and every point in
// [a, b]. Budget (epsilon, 0) under addition, removal or replacement.
absl::StatusOr<EstimateOutcome> SmoothSensitivityMean(
    std::span<const double> data, double epsilon, double a, double b,
    NoiseSource& source);

// 1/n + (9/eps^2)(b - a)^2 max(exp(-eps (n - 1)/6), 1/n^2) for unit variance.
double SmoothSensitivityMseBound(int64_t n, double epsilon, double a, double b);

}  // namespace dpmean

#endif  // DPMEAN_UNKNOWN_SIZE_H_
