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

#include "dpmean/bounds.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace dpmean {

absl::StatusOr<double> TauFromMoment(double delta, double kappa) {
  if (!(kappa > 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("kappa must exceed 1, got ", kappa));
  }
  if (!(delta >= 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  if (delta == 0) return 0.0;
  if (std::isinf(kappa)) return delta;
  return std::pow(delta, 1 - 1 / kappa);
}

double TrilemmaLowerBoundRaw(const TrilemmaPoint& p) {
  const double n = static_cast<double>(p.n);
  const double denominator =
      32 * n * std::sinh(p.epsilon) * std::pow(p.gamma, 1 / (p.lambda - 1)) +
      16 * n * p.tau / p.gamma;
  if (!(denominator > 0)) return kInfinity;
  return 1 / denominator;
}

bool TrilemmaRegimeOk(const TrilemmaPoint& p) {
  return 16 * p.beta <= p.gamma && p.gamma <= 0.2 && p.tau >= 0 &&
         p.lambda > 1 && p.n >= 1;
}

absl::StatusOr<double> TrilemmaLowerBound(const TrilemmaPoint& p) {
  if (!TrilemmaRegimeOk(p)) {
    return absl::OutOfRangeError(absl::StrCat(
        "trilemma bound needs 16 beta <= gamma <= 1/5, got beta=", p.beta,
        " gamma=", p.gamma));
  }
  return TrilemmaLowerBoundRaw(p);
}

double OptimalGamma(double beta, double lambda, double tau, double epsilon) {
  const double unclipped = std::pow((lambda - 1) * tau / (2 * std::sinh(epsilon)),
                                    1 - 1 / lambda);
  return std::clamp(unclipped, 16 * beta, 0.2);
}

double TrilemmaCorollaryRaw(int64_t n, double epsilon, double delta,
                            double beta, double lambda) {
  const double s = std::sinh(epsilon);
  const double spread = std::max(
      std::pow(16 * beta, 1 / (lambda - 1)),
      std::pow((lambda - 1) * std::sqrt(delta) / (2 * s), 1 / lambda));
  const double denominator =
      32 * static_cast<double>(n) * s * lambda / (lambda - 1) * spread;
  if (!(denominator > 0)) return kInfinity;
  return 1 / denominator;
}

absl::StatusOr<double> TrilemmaCorollary(int64_t n, double epsilon,
                                         double delta, double beta,
                                         double lambda) {
  if (!(lambda > 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must exceed 1, got ", lambda));
  }
  if (!(beta <= 1.0 / 80)) {
    return absl::OutOfRangeError(
        absl::StrCat("requires beta <= 1/80, got ", beta));
  }
  const double limit = std::pow(
      2 * std::sinh(epsilon) /
          (std::pow(5.0, 1 + 1 / (lambda - 1)) * (lambda - 1)),
      2);
  if (!(delta <= limit)) {
    return absl::OutOfRangeError(absl::StrCat(
        "requires delta <= (2 sinh(eps) / (5^{1+1/(lambda-1)} (lambda-1)))^2 = ",
        limit, ", got ", delta));
  }
  return TrilemmaCorollaryRaw(n, epsilon, delta, beta, lambda);
}

double TrilemmaLambda2Raw(int64_t n, double epsilon, double delta,
                          double beta) {
  const double nd = static_cast<double>(n);
  const double s = std::sinh(epsilon);
  const double floor = 1 / std::sqrt(6 * (nd + 2));
  const double spread =
      std::max(16 * beta, std::sqrt(std::sqrt(delta) / (2 * s)));
  const double denominator = 64 * nd * s * spread;
  const double privacy = denominator > 0 ? 1 / denominator : kInfinity;
  return std::max(floor, privacy);
}

absl::StatusOr<double> TrilemmaLambda2(int64_t n, double epsilon,
                                       double delta, double beta) {
  if (!(beta <= 1.0 / 80)) {
    return absl::OutOfRangeError(
        absl::StrCat("requires beta <= 1/80, got ", beta));
  }
  const double limit = std::pow(2.0 / 25 * std::sinh(epsilon), 2);
  if (!(delta <= limit)) {
    return absl::OutOfRangeError(absl::StrCat(
        "requires delta <= ((2/25) sinh(eps))^2 = ", limit, ", got ", delta));
  }
  return TrilemmaLambda2Raw(n, epsilon, delta, beta);
}

double TightnessUpperBound(int64_t n, double epsilon, double delta,
                           double beta, double psi) {
  const double nd = static_cast<double>(n);
  const double ne = nd * epsilon;
  const double clipped = 1 / (ne * ne * beta * beta) + beta * beta;
  const double combined =
      std::isinf(psi) ? kInfinity
                      : psi * psi / (std::pow(nd, 1.5) * epsilon *
                                     std::sqrt(delta)) +
                            1 / (ne * ne);
  const double shame = 1 / (nd * delta);
  return 1 / nd + std::min({clipped, combined, shame});
}

double ShuffledEpsilonRaw(double epsilon0, int64_t m, double delta1) {
  const double e = std::exp(epsilon0);
  const double md = static_cast<double>(m);
  return std::log1p(8 * (e - 1) / (e + 1) *
                    (std::sqrt(e * std::log(4 / delta1) / md) + e / md));
}

double ShuffledDeltaFloor(double epsilon0, int64_t m) {
  return 2 * std::exp(-static_cast<double>(m) / (16 * std::exp(epsilon0)));
}

absl::StatusOr<ShuffledPrivacy> ShuffledEpsilon(double epsilon0, int64_t m,
                                                double delta1, double delta0) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("m must be positive, got ", m));
  }
  if (!(epsilon0 >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon0 must be non-negative, got ", epsilon0));
  }
  const double floor = ShuffledDeltaFloor(epsilon0, m);
  if (!(delta1 >= floor && delta1 <= 1)) {
    return absl::OutOfRangeError(absl::StrCat(
        "delta1 must lie in [2 exp(-m/(16 e^eps0)), 1] = [", floor,
        ", 1], got ", delta1));
  }
  ShuffledPrivacy out;
  out.epsilon = ShuffledEpsilonRaw(epsilon0, m, delta1);
  out.delta = delta1 + (std::exp(out.epsilon) + 1) *
                           (std::exp(-epsilon0) / 2 + 1) *
                           static_cast<double>(m) * delta0;
  return out;
}

double ShufflingLowerBoundRaw(int64_t n, double epsilon, double beta) {
  const double nd = static_cast<double>(n);
  const double x = nd * epsilon * epsilon * beta * beta;
  const double log_term = -std::log(x);
  if (!(log_term > 0)) return kInfinity;
  return 1 / (nd * x * log_term);
}

bool ShufflingRegimeOk(int64_t n, double epsilon, double delta, double beta) {
  const double nd = static_cast<double>(n);
  return beta * beta <= 1 / (nd * epsilon * epsilon) &&
         delta <= nd * nd * nd * std::pow(epsilon, 4) * std::pow(beta, 6);
}

absl::StatusOr<double> ShufflingLowerBound(int64_t n, double epsilon,
                                           double delta, double beta) {
  if (!ShufflingRegimeOk(n, epsilon, delta, beta)) {
    return absl::OutOfRangeError(absl::StrCat(
        "requires beta^2 <= 1/(n eps^2) and delta <= n^3 eps^4 beta^6, got n=",
        n, " eps=", epsilon, " delta=", delta, " beta=", beta));
  }
  return ShufflingLowerBoundRaw(n, epsilon, beta);
}

double KsuLowerBound(int64_t n, double epsilon, double delta) {
  return 1 / (static_cast<double>(n) * (epsilon + delta));
}

double NonprivateFloor(int64_t n) {
  return 1 / (6 * (static_cast<double>(n) + 2));
}

absl::StatusOr<double> HodgesEstimator(std::span<const double> bits) {
  if (bits.empty()) {
    return absl::InvalidArgumentError("data must contain at least one point");
  }
  double sum = 0.0;
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0.0 && bits[i] != 1.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("point ", i, " = ", bits[i], " is not binary"));
    }
    sum += bits[i];
  }
  const double n = static_cast<double>(bits.size());
  const double root = std::sqrt(n);
  return (root / 2 + sum) / (n + root);
}

double HodgesMse(int64_t n) {
  const double root = std::sqrt(static_cast<double>(n));
  return 1 / (4 * (root + 1) * (root + 1));
}

}  // namespace dpmean
