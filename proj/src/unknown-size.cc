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

#include "dpmean/unknown-size.h"

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
#include "dpmean/mechanisms.h"
#include "dpmean/noise.h"

namespace dpmean {
namespace {

absl::Status CheckBudget(double epsilon, double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::Status CheckRange(double a, double b) {
  if (!(a <= b)) {
    return absl::InvalidArgumentError(
        absl::StrCat("range requires a <= b, got [", a, ", ", b, "]"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<int64_t> SizeMargin(double epsilon, double delta) {
  if (absl::Status s = CheckBudget(epsilon, delta); !s.ok()) return s;
  return static_cast<int64_t>(std::ceil(std::log(2 / delta) / epsilon));
}

absl::StatusOr<SizeEstimate> PrivateSize(int64_t n, double epsilon,
                                         double delta, NoiseSource& source) {
  if (n < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset size must be non-negative, got ", n));
  }
  absl::StatusOr<int64_t> margin = SizeMargin(epsilon, delta);
  if (!margin.ok()) return margin.status();
  const int64_t z = source.DiscreteLaplace(epsilon);
  const int64_t clipped = std::clamp<int64_t>(z, -*margin, *margin);
  return SizeEstimate{n + clipped - *margin, *margin};
}

absl::StatusOr<EstimateOutcome> SizeObliviousWrap(const MeanMechanism& family,
                                                  std::span<const double> data,
                                                  double epsilon, double delta,
                                                  int64_t min_size,
                                                  NoiseSource& source) {
  const int64_t n = static_cast<int64_t>(data.size());
  std::unique_ptr<NoiseSource> size_source = source.Split(0);
  absl::StatusOr<SizeEstimate> size =
      PrivateSize(n, epsilon, delta, *size_source);
  if (!size.ok()) return size.status();
  const PrivacyBudget size_budget{epsilon, delta};
  if (size->size < min_size || size->size < 0) {
    return EstimateOutcome{std::nullopt, size_budget};
  }

  // Partial Fisher-Yates: the first `size` slots become a uniform subset.
  std::vector<double> subset(data.begin(), data.end());
  std::unique_ptr<NoiseSource> subset_source = source.Split(1);
  const size_t keep = static_cast<size_t>(size->size);
  for (size_t i = 0; i < keep; ++i) {
    const size_t j = i + subset_source->UniformIndex(subset.size() - i);
    std::swap(subset[i], subset[j]);
  }
  subset.resize(keep);

  std::unique_ptr<NoiseSource> family_source = source.Split(2);
  absl::StatusOr<EstimateOutcome> outcome = family(subset, *family_source);
  if (!outcome.ok()) return outcome.status();
  outcome->budget.epsilon += epsilon;
  outcome->budget.delta = std::min(1.0, outcome->budget.delta + delta);
  return outcome;
}

absl::StatusOr<double> MeanLocalSensitivity(int64_t n, double a, double b) {
  if (absl::Status s = CheckRange(a, b); !s.ok()) return s;
  return (b - a) / static_cast<double>(std::max<int64_t>(n, 1));
}

absl::StatusOr<double> MeanSmoothSensitivity(int64_t n, double a, double b,
                                             double beta) {
  if (absl::Status s = CheckRange(a, b); !s.ok()) return s;
  if (!(beta > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive, got ", beta));
  }
  const double nd = static_cast<double>(n);
  return (b - a) * std::max(std::exp(-beta * (nd - 1)),
                            1 / std::max(nd, 1.0));
}

absl::StatusOr<SmoothSensParams> SmoothSensParams::ForEpsilon(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  return SmoothSensParams{epsilon / 12, std::sqrt(3.0) / epsilon, 3};
}

absl::StatusOr<EstimateOutcome> SmoothSensitivityMean(
    std::span<const double> data, double epsilon, double a, double b,
    NoiseSource& source) {
  if (absl::Status s = CheckRange(a, b); !s.ok()) return s;
  if (a > 0 || b < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the range must contain 0, got [", a, ", ", b, "]"));
  }
  absl::StatusOr<SmoothSensParams> params = SmoothSensParams::ForEpsilon(epsilon);
  if (!params.ok()) return params.status();

  double sum = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] >= a && data[i] <= b)) {
      return absl::InvalidArgumentError(
          absl::StrCat("point ", i, " = ", data[i], " lies outside [", a, ", ",
                       b, "]"));
    }
    sum += data[i];
  }
  const int64_t n = static_cast<int64_t>(data.size());
  const double mean = n == 0 ? 0.0 : sum / static_cast<double>(n);
  absl::StatusOr<double> smooth = MeanSmoothSensitivity(n, a, b, params->beta);
  if (!smooth.ok()) return smooth.status();
  const double z = source.StudentT(params->degrees_of_freedom);
  return EstimateOutcome{mean + params->tau * *smooth * z,
                         PrivacyBudget{epsilon, 0.0}};
}

double SmoothSensitivityMseBound(int64_t n, double epsilon, double a,
                                 double b) {
  const double nd = static_cast<double>(n);
  const double width = b - a;
  return 1 / nd + (9 / (epsilon * epsilon)) * width * width *
                      std::max(std::exp(-epsilon * (nd - 1) / 6),
                               1 / (nd * nd));
}

}  // namespace dpmean
