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

#ifndef DPMEAN_BOUNDS_H_
#define DPMEAN_BOUNDS_H_

#include <cstdint>
#include <limits>
#include <span>

#include "absl/status/statusor.h"

// Closed-form tradeoff bounds. Every asymptotic constant is taken as 1, so the
// values are meaningful up to unspecified constants. "Raw" functions evaluate
// the formula anywhere it is defined; the checked variants also enforce the
// parameter regime in which the bound is proven.
namespace dpmean {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// delta^{1 - 1/kappa}; kappa = +inf gives delta.
absl::StatusOr<double> TauFromMoment(double delta, double kappa);

struct TrilemmaPoint {
  int64_t n = 1;
  double epsilon = 1.0;
  double delta = 0.0;
  double beta = 0.0;
  double lambda = 2.0;
  double tau = 0.0;
  double gamma = 0.2;
};

// (32 n sinh(eps) gamma^{1/(lambda-1)} + 16 n tau / gamma)^{-1}: a lower bound
// on the root-MSE of any estimator with bias at most beta.
double TrilemmaLowerBoundRaw(const TrilemmaPoint& p);
// Requires 16 beta <= gamma <= 1/5.
absl::StatusOr<double> TrilemmaLowerBound(const TrilemmaPoint& p);
bool TrilemmaRegimeOk(const TrilemmaPoint& p);

// clip_{[16 beta, 1/5]}(((lambda - 1) tau / (2 sinh eps))^{1 - 1/lambda}).
double OptimalGamma(double beta, double lambda, double tau, double epsilon);

// (32 n sinh(eps) lambda/(lambda-1) max{(16 beta)^{1/(lambda-1)},
//   ((lambda-1) sqrt(delta) / (2 sinh eps))^{1/lambda}})^{-1}.
double TrilemmaCorollaryRaw(int64_t n, double epsilon, double delta,
                            double beta, double lambda);
// Requires beta <= 1/80 and
// delta <= (2 sinh(eps) / (5^{1 + 1/(lambda-1)} (lambda - 1)))^2.
absl::StatusOr<double> TrilemmaCorollary(int64_t n, double epsilon,
                                         double delta, double beta,
                                         double lambda);

// max{1/sqrt(6(n+2)), 1/(64 n sinh(eps) max{16 beta,
//   sqrt(sqrt(delta)/(2 sinh eps))})}.
double TrilemmaLambda2Raw(int64_t n, double epsilon, double delta, double beta);
// Requires beta <= 1/80 and delta <= ((2/25) sinh eps)^2; the error names the
// violated condition.
absl::StatusOr<double> TrilemmaLambda2(int64_t n, double epsilon,
                                       double delta, double beta);

// MSE achievable with bias beta:
//   1/n + min{1/(n eps beta)^2 + beta^2,
//             psi^2/(n^{3/2} eps sqrt(delta)) + 1/(n eps)^2, 1/(n delta)}.
// psi = +inf drops the middle branch.
double TightnessUpperBound(int64_t n, double epsilon, double delta,
                           double beta, double psi);

struct ShuffledPrivacy {
  double epsilon = 0.0;
  // delta1 + (e^{eps1} + 1)(e^{-eps0}/2 + 1) m delta0.
  double delta = 0.0;
};

double ShuffledEpsilonRaw(double epsilon0, int64_t m, double delta1);
// Smallest admissible delta1: 2 exp(-m / (16 e^{eps0})).
double ShuffledDeltaFloor(double epsilon0, int64_t m);
// Requires delta1 in [ShuffledDeltaFloor, 1].
absl::StatusOr<ShuffledPrivacy> ShuffledEpsilon(double epsilon0, int64_t m,
                                                double delta1,
                                                double delta0 = 0.0);

// 1/((n eps beta)^2 ln(1/(n eps^2 beta^2))), a lower bound on the MSE.
// Returns +inf where the logarithm vanishes or turns negative.
double ShufflingLowerBoundRaw(int64_t n, double epsilon, double beta);
// beta^2 <= 1/(n eps^2) and delta <= n^3 eps^4 beta^6.
bool ShufflingRegimeOk(int64_t n, double epsilon, double delta, double beta);
absl::StatusOr<double> ShufflingLowerBound(int64_t n, double epsilon,
                                           double delta, double beta);

// 1/(n (eps + delta)): MSE lower bound for private estimators with
// bounded bias.
double KsuLowerBound(int64_t n, double epsilon, double delta);

// 1/(6 (n + 2)): MSE lower bound for any estimator of a Bernoulli mean.
double NonprivateFloor(int64_t n);

// (sqrt(n)/2 + sum x) / (n + sqrt(n)) for binary data.
absl::StatusOr<double> HodgesEstimator(std::span<const double> bits);
// 1/(4 (sqrt(n) + 1)^2), independent of the Bernoulli parameter.
double HodgesMse(int64_t n);

}  // namespace dpmean

#endif  // DPMEAN_BOUNDS_H_
