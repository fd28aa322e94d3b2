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
#include <vector>

#include "boost/math/quadrature/gauss.hpp"
#include "boost/math/special_functions/binomial.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "status_matchers.h"

namespace dpmean {
namespace {

using ::dpmean::testing::StatusIs;
using ::testing::DoubleNear;
using ::testing::HasSubstr;

constexpr auto kInvalid = absl::StatusCode::kInvalidArgument;
constexpr auto kOutOfRange = absl::StatusCode::kOutOfRange;

MATCHER_P2(RelNear, expected, rel, "") {
  return std::abs(arg - expected) <= rel * std::abs(expected);
}

TEST(TauFromMomentTest, Values) {
  EXPECT_NEAR(*TauFromMoment(1e-4, 2), 1e-2, 1e-15);
  EXPECT_EQ(*TauFromMoment(0.25, kInfinity), 0.25);
  EXPECT_NEAR(*TauFromMoment(0.25, 1e9), 0.25, 1e-9);
  EXPECT_EQ(*TauFromMoment(0, 3), 0);
  EXPECT_THAT(TauFromMoment(0.1, 1), StatusIs(kInvalid));
  EXPECT_THAT(TauFromMoment(1.5, 2), StatusIs(kInvalid));
}

TEST(TrilemmaLowerBoundTest, WorkedValue) {
  TrilemmaPoint p{.n = 100, .epsilon = 1, .delta = 0, .beta = 0, .lambda = 2,
                  .tau = 0, .gamma = 0.2};
  EXPECT_THAT(*TrilemmaLowerBound(p), RelNear(1 / (3200 * std::sinh(1.0) * 0.2), 1e-12));
  EXPECT_THAT(*TrilemmaLowerBound(p), DoubleNear(1.329e-3, 1e-6));
  p.tau = 1e300;
  EXPECT_LT(TrilemmaLowerBoundRaw(p), 1e-300);
}

TEST(TrilemmaLowerBoundTest, GammaOutsideRegime) {
  TrilemmaPoint p{.n = 100, .epsilon = 1, .beta = 0.01, .tau = 0.01, .gamma = 0.1};
  EXPECT_THAT(TrilemmaLowerBound(p), StatusIs(kOutOfRange));
  EXPECT_FALSE(TrilemmaRegimeOk(p));
  p.gamma = 0.16;
  EXPECT_TRUE(TrilemmaRegimeOk(p));
  p.gamma = 0.21;
  EXPECT_THAT(TrilemmaLowerBound(p), StatusIs(kOutOfRange, HasSubstr("gamma")));
}

TEST(TrilemmaLowerBoundTest, MonotoneInSizeEpsilonTau) {
  TrilemmaPoint base{.n = 100, .epsilon = 1, .beta = 1e-3, .lambda = 3,
                     .tau = 1e-3, .gamma = 0.1};
  double prev = kInfinity;
  for (int64_t n = 1; n <= 100000; n *= 3) {
    TrilemmaPoint p = base;
    p.n = n;
    const double v = *TrilemmaLowerBound(p);
    EXPECT_LE(v, prev);
    prev = v;
  }
  prev = kInfinity;
  for (double eps = 0.01; eps <= 10; eps *= 1.7) {
    TrilemmaPoint p = base;
    p.epsilon = eps;
    const double v = *TrilemmaLowerBound(p);
    EXPECT_LE(v, prev);
    prev = v;
  }
  prev = kInfinity;
  for (double tau = 0; tau <= 1; tau = tau * 2 + 1e-6) {
    TrilemmaPoint p = base;
    p.tau = tau;
    const double v = *TrilemmaLowerBound(p);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(OptimalGammaTest, Values) {
  EXPECT_NEAR(OptimalGamma(1e-3, 2, 1e-2, 1), std::sqrt(1e-2 / (2 * std::sinh(1.0))),
              1e-15);
  EXPECT_NEAR(OptimalGamma(1e-3, 2, 1e-2, 1), 0.06523, 5e-6);
  EXPECT_EQ(OptimalGamma(1e-3, 2, 0, 1), 16e-3);
  EXPECT_EQ(OptimalGamma(1e-3, 2, 1e6, 1), 0.2);
}

// The closed-form gamma should beat a fine grid over the admissible interval
// whenever it lands strictly inside it.
TEST(OptimalGammaTest, DominatesGridSearch) {
  int interior = 0;
  for (double lambda : {2.0, 3.0, 5.0}) {
    for (double tau : {1e-5, 1e-4, 1e-3, 1e-2}) {
      for (double eps : {0.1, 1.0, 3.0}) {
        const double beta = 1e-4;
        const double g = OptimalGamma(beta, lambda, tau, eps);
        TrilemmaPoint p{.n = 1000, .epsilon = eps, .beta = beta, .lambda = lambda,
                        .tau = tau, .gamma = g};
        const double at_opt = *TrilemmaLowerBound(p);
        p.gamma = 16 * beta;
        const double at_low = *TrilemmaLowerBound(p);
        p.gamma = 0.2;
        const double at_high = *TrilemmaLowerBound(p);
        EXPECT_GE(at_opt, std::min(at_low, at_high));
        if (g <= 16 * beta || g >= 0.2) continue;
        ++interior;
        EXPECT_GE(at_opt * (1 + 1e-12), at_low);
        EXPECT_GE(at_opt * (1 + 1e-12), at_high);
        double best = 0;
        for (int i = 0; i <= 20000; ++i) {
          p.gamma = 16 * beta + (0.2 - 16 * beta) * i / 20000.0;
          best = std::max(best, *TrilemmaLowerBound(p));
        }
        // Balancing the two denominator terms is within a factor 2 of the
        // true optimum.
        EXPECT_GE(at_opt, best / 2);
      }
    }
  }
  EXPECT_GT(interior, 5);
}

TEST(TrilemmaLambda2Test, FloorWins) {
  DPMEAN_ASSERT_OK_AND_ASSIGN(double v, TrilemmaLambda2(10000, 1, 0, 1.0 / 80));
  const double privacy = 1 / (64 * 1e4 * std::sinh(1.0) * 0.2);
  const double floor = 1 / std::sqrt(6 * (1e4 + 2));
  EXPECT_NEAR(privacy, 6.65e-6, 5e-9);
  EXPECT_NEAR(floor, 4.08e-3, 5e-6);
  EXPECT_DOUBLE_EQ(v, floor);
}

TEST(TrilemmaLambda2Test, NamesViolatedCondition) {
  EXPECT_THAT(TrilemmaLambda2(100, 1, 0, 0.02),
              StatusIs(kOutOfRange, HasSubstr("beta <= 1/80")));
  EXPECT_THAT(TrilemmaLambda2(100, 1, 0.1, 1e-3),
              StatusIs(kOutOfRange, HasSubstr("delta <=")));
  EXPECT_TRUE(TrilemmaLambda2(100, 1, std::pow(0.08 * std::sinh(1.0), 2), 1e-3).ok());
}

// With eps and beta fixed, the privacy term falls like 1/n and the floor
// like 1/sqrt(n): the privacy term dominates small n and the floor large n,
// with a single crossover.
TEST(TrilemmaLambda2Test, SingleCrossover) {
  const double eps = 1, beta = 1e-3;
  int switches = 0;
  bool privacy_wins_prev = true;
  for (int64_t n = 1; n <= 100000000; n = n * 11 / 10 + 1) {
    const double privacy = 1 / (64.0 * n * std::sinh(eps) * 16 * beta);
    const double floor = 1 / std::sqrt(6.0 * (n + 2));
    const bool privacy_wins = privacy > floor;
    if (n == 1) {
      EXPECT_TRUE(privacy_wins);
    } else if (privacy_wins != privacy_wins_prev) {
      ++switches;
    }
    privacy_wins_prev = privacy_wins;
    EXPECT_DOUBLE_EQ(TrilemmaLambda2Raw(n, eps, 0, beta), std::max(privacy, floor));
  }
  EXPECT_EQ(switches, 1);
  EXPECT_FALSE(privacy_wins_prev);
}

TEST(TrilemmaCorollaryTest, Lambda2CaseMatchesPrivacyTerm) {
  // At lambda = 2 the corollary reduces to the privacy term of the
  // specialization.
  for (double beta : {1e-4, 1e-3, 1.0 / 80}) {
    for (double delta : {0.0, 1e-8, 1e-4}) {
      const double c = *TrilemmaCorollary(1000, 1, delta, beta, 2);
      const double direct =
          1 / (32 * 1000 * std::sinh(1.0) * 2 *
               std::max(16 * beta, std::sqrt(std::sqrt(delta) / (2 * std::sinh(1.0)))));
      EXPECT_THAT(c, RelNear(direct, 1e-12));
      EXPECT_LE(c, TrilemmaLambda2Raw(1000, 1, delta, beta) * (1 + 1e-12));
    }
  }
  EXPECT_THAT(TrilemmaCorollary(1000, 1, 0, 0.02, 2), StatusIs(kOutOfRange));
  EXPECT_THAT(TrilemmaCorollary(1000, 1, 0.5, 1e-3, 2), StatusIs(kOutOfRange));
  EXPECT_THAT(TrilemmaCorollary(1000, 1, 0, 1e-3, 1), StatusIs(kInvalid));
}

TEST(TightnessUpperBoundTest, Branches) {
  // delta = 1 with the first branch priced out leaves 1/n + 1/(n delta).
  EXPECT_DOUBLE_EQ(TightnessUpperBound(100, 1, 1, 1e-6, kInfinity), 0.01 + 0.01);
  const double n = 1000, eps = 1, delta = 1e-6, beta = 0.01, psi = 1;
  const double first = 1 / std::pow(n * eps * beta, 2) + beta * beta;
  const double middle =
      psi * psi / (std::pow(n, 1.5) * eps * std::sqrt(delta)) + 1 / std::pow(n * eps, 2);
  const double last = 1 / (n * delta);
  EXPECT_DOUBLE_EQ(TightnessUpperBound(1000, eps, delta, beta, psi),
                   1 / n + std::min({first, middle, last}));
  EXPECT_DOUBLE_EQ(TightnessUpperBound(1000, eps, delta, beta, kInfinity),
                   1 / n + std::min(first, last));
  // As beta vanishes the first branch diverges and another one is chosen.
  EXPECT_DOUBLE_EQ(TightnessUpperBound(1000, eps, delta, 1e-12, psi),
                   1 / n + std::min(middle, last));
}

TEST(ShuffledEpsilonTest, WorkedValue) {
  const double e = std::exp(1.0);
  const double oracle = std::log1p(8 * (e - 1) / (e + 1) *
                                   (std::sqrt(e * std::log(4e6) / 1e4) + e / 1e4));
  EXPECT_NEAR(std::log(4e6), 15.2018, 1e-4);
  EXPECT_THAT(ShuffledEpsilonRaw(1, 10000, 1e-6), RelNear(oracle, 1e-12));
  EXPECT_NEAR(ShuffledEpsilonRaw(1, 10000, 1e-6), 0.214, 5e-4);
  DPMEAN_ASSERT_OK_AND_ASSIGN(ShuffledPrivacy sp, ShuffledEpsilon(1, 10000, 1e-6));
  EXPECT_EQ(sp.epsilon, ShuffledEpsilonRaw(1, 10000, 1e-6));
  EXPECT_EQ(sp.delta, 1e-6);
}

TEST(ShuffledEpsilonTest, ComposedDelta) {
  DPMEAN_ASSERT_OK_AND_ASSIGN(ShuffledPrivacy sp, ShuffledEpsilon(1, 10000, 1e-6, 1e-12));
  const double expected =
      1e-6 + (std::exp(sp.epsilon) + 1) * (std::exp(-1.0) / 2 + 1) * 10000 * 1e-12;
  EXPECT_THAT(sp.delta, RelNear(expected, 1e-12));
}

TEST(ShuffledEpsilonTest, AdmissibleFloor) {
  const double floor = ShuffledDeltaFloor(1, 1000);
  EXPECT_THAT(floor, RelNear(2 * std::exp(-1000 / (16 * std::exp(1.0))), 1e-12));
  EXPECT_TRUE(ShuffledEpsilon(1, 1000, floor).ok());
  EXPECT_THAT(ShuffledEpsilon(1, 1000, floor / 2), StatusIs(kOutOfRange));
  EXPECT_THAT(ShuffledEpsilon(1, 1000, 1.5), StatusIs(kOutOfRange));
  EXPECT_THAT(ShuffledEpsilon(1, 0, 0.5), StatusIs(kInvalid));
}

TEST(ShuffledEpsilonTest, VanishesWithBlocksAndAmplifies) {
  double prev = kInfinity;
  for (int64_t m = 100; m <= 100000000; m *= 10) {
    const double e1 = ShuffledEpsilonRaw(1, m, 1e-6);
    EXPECT_LT(e1, prev);
    prev = e1;
  }
  EXPECT_LT(prev, 0.01);
  for (double eps0 = 0.05; eps0 <= 1; eps0 += 0.05) {
    for (int64_t m = 100; m <= 1000000; m = m * 3 / 2) {
      // Amplification only applies where delta1 is admissible.
      if (ShuffledDeltaFloor(eps0, m) > 1e-6) continue;
      EXPECT_LT(ShuffledEpsilonRaw(eps0, m, 1e-6), eps0) << eps0 << " " << m;
    }
  }
}

TEST(ShufflingLowerBoundTest, WorkedValue) {
  DPMEAN_ASSERT_OK_AND_ASSIGN(double v, ShufflingLowerBound(10000, 1, 0, 1e-3));
  EXPECT_THAT(v, RelNear(1 / (100 * std::log(100.0)), 1e-12));
  EXPECT_NEAR(v, 2.17e-3, 5e-6);
}

TEST(ShufflingLowerBoundTest, BoundarySentinelAndRegime) {
  // beta^2 = 1/(n eps^2) exactly.
  EXPECT_EQ(ShufflingLowerBoundRaw(10000, 1, 0.01), kInfinity);
  EXPECT_EQ(ShufflingLowerBoundRaw(10000, 1, 0.02), kInfinity);
  EXPECT_TRUE(ShufflingRegimeOk(10000, 1, 1e-6, 1e-3));
  EXPECT_FALSE(ShufflingRegimeOk(10000, 1, 2e-6, 1e-3));
  EXPECT_FALSE(ShufflingRegimeOk(10000, 1, 0, 0.02));
  EXPECT_THAT(ShufflingLowerBound(10000, 1, 2e-6, 1e-3), StatusIs(kOutOfRange));
}

// Re-derives the bound by averaging m blocks: delta1 = n eps^2 beta^2,
// m = 1/(n^2 eps^2 beta^4 log(1/delta1)), amplified epsilon
// eps sqrt(log(1/delta1)/m), and the bias-free bound on n m samples scaled
// back by m.
TEST(ShufflingLowerBoundTest, PipelineRecomputation) {
  for (int64_t n : {100, 10000, 1000000}) {
    for (double eps : {0.1, 1.0}) {
      for (double frac : {1e-4, 1e-2, 0.5}) {
        const double beta = std::sqrt(frac / (n * eps * eps));
        const double delta1 = n * eps * eps * beta * beta;
        const double log_term = std::log(1 / delta1);
        const double m = 1 / (n * n * eps * eps * std::pow(beta, 4) * log_term);
        const double amplified = eps * std::sqrt(log_term / m);
        const double pipeline = m / (n * m * amplified);
        EXPECT_THAT(ShufflingLowerBoundRaw(n, eps, beta), RelNear(pipeline, 1e-9));
        // KsuLowerBound is the same formula on an integer sample count.
        EXPECT_THAT(KsuLowerBound(n, amplified * m, 0) * m, RelNear(pipeline, 1e-9));
      }
    }
  }
}

// Without constants the shuffling bound exceeds the squared privacy term of
// the fingerprinting bound by at most (1024 sinh(eps)/eps)^2 / log.
TEST(ShufflingLowerBoundTest, ComparedWithFingerprinting) {
  for (int64_t n : {1000, 100000}) {
    for (double eps : {0.1, 1.0}) {
      for (double beta : {1e-4, 1e-3}) {
        if (!ShufflingRegimeOk(n, eps, 0, beta)) continue;
        const double shuffle = ShufflingLowerBoundRaw(n, eps, beta);
        const double log_term = std::log(1 / (n * eps * eps * beta * beta));
        const double fp = 1 / (64.0 * n * std::sinh(eps) * 16 * beta);
        EXPECT_LE(shuffle * log_term,
                  std::pow(1024 * std::sinh(eps) / eps, 2) * fp * fp * (1 + 1e-12));
        EXPECT_GE(shuffle * log_term, fp * fp);
      }
    }
  }
}

TEST(KsuLowerBoundTest, Values) {
  EXPECT_DOUBLE_EQ(KsuLowerBound(100, 1, 0), 0.01);
  EXPECT_DOUBLE_EQ(KsuLowerBound(50, 1, 0), 2 * KsuLowerBound(100, 1, 0));
  EXPECT_DOUBLE_EQ(KsuLowerBound(100, 0.5, 0.5), 0.01);
}

TEST(NonprivateFloorTest, Values) {
  EXPECT_DOUBLE_EQ(NonprivateFloor(1), 1.0 / 18);
  EXPECT_DOUBLE_EQ(NonprivateFloor(4), 1.0 / 36);
}

// Bayes risk of the posterior mean under a uniform prior on the Bernoulli
// parameter, integrated by Gauss-Legendre (exact for these polynomials).
TEST(NonprivateFloorTest, BayesRiskQuadrature) {
  for (int n = 1; n <= 12; ++n) {
    const auto risk_at = [n](double p) {
      double r = 0;
      for (int k = 0; k <= n; ++k) {
        const double post_mean = (k + 1.0) / (n + 2.0);
        r += boost::math::binomial_coefficient<double>(n, k) * std::pow(p, k) *
             std::pow(1 - p, n - k) * (p - post_mean) * (p - post_mean);
      }
      return r;
    };
    const double risk =
        boost::math::quadrature::gauss<double, 30>::integrate(risk_at, 0.0, 1.0);
    EXPECT_NEAR(risk, NonprivateFloor(n), 1e-9) << "n=" << n;
    // The same risk as the averaged Beta posterior variance.
    double closed = 0;
    for (int k = 0; k <= n; ++k) {
      const double a = k + 1, b = n - k + 1;
      closed += a * b / ((a + b) * (a + b) * (a + b + 1)) / (n + 1);
    }
    EXPECT_NEAR(closed, NonprivateFloor(n), 1e-12);
  }
}

TEST(HodgesTest, Values) {
  const std::vector<double> bits = {1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(*HodgesEstimator(bits), 0.5);
  EXPECT_DOUBLE_EQ(HodgesMse(4), 1.0 / 36);
  const std::vector<double> bad = {1, 0.5};
  EXPECT_THAT(HodgesEstimator(bad), StatusIs(kInvalid));
  EXPECT_THAT(HodgesEstimator({}), StatusIs(kInvalid));
}

TEST(HodgesTest, MseIndependentOfParameter) {
  for (int n = 1; n <= 12; ++n) {
    for (int i = 0; i <= 10; ++i) {
      const double p = i / 10.0;
      double mse = 0;
      for (int k = 0; k <= n; ++k) {
        std::vector<double> bits(n, 0.0);
        std::fill(bits.begin(), bits.begin() + k, 1.0);
        const double est = *HodgesEstimator(bits);
        mse += boost::math::binomial_coefficient<double>(n, k) * std::pow(p, k) *
               std::pow(1 - p, n - k) * (est - p) * (est - p);
      }
      EXPECT_NEAR(mse, HodgesMse(n), 1e-12) << "n=" << n << " p=" << p;
    }
    EXPECT_GE(HodgesMse(n), NonprivateFloor(n));
  }
}

TEST(BoundsPropertyTest, LowerBoundsNonIncreasing) {
  const std::vector<int64_t> ns = {10, 100, 1000, 10000, 100000};
  const std::vector<double> epss = {0.05, 0.1, 0.5, 1, 2};
  const std::vector<double> deltas = {0, 1e-10, 1e-8, 1e-6, 1e-5};
  const std::vector<double> betas = {1e-5, 1e-4, 1e-3, 5e-3, 1.0 / 80};
  for (int64_t n : ns) {
    for (double eps : epss) {
      for (double delta : deltas) {
        for (double beta : betas) {
          const double l2 = TrilemmaLambda2Raw(n, eps, delta, beta);
          const double ksu = KsuLowerBound(n, eps, delta);
          const double sh = ShufflingLowerBoundRaw(n, eps, beta);
          const double co = TrilemmaCorollaryRaw(n, eps, delta, beta, 3);
          EXPECT_LE(TrilemmaLambda2Raw(n * 10, eps, delta, beta), l2);
          EXPECT_LE(TrilemmaLambda2Raw(n, eps * 2, delta, beta), l2);
          EXPECT_LE(TrilemmaLambda2Raw(n, eps, delta * 10 + 1e-12, beta), l2);
          EXPECT_LE(TrilemmaLambda2Raw(n, eps, delta, beta * 2), l2);
          EXPECT_LE(TrilemmaCorollaryRaw(n * 10, eps, delta, beta, 3), co);
          EXPECT_LE(TrilemmaCorollaryRaw(n, eps * 2, delta, beta, 3), co);
          EXPECT_LE(TrilemmaCorollaryRaw(n, eps, delta * 10 + 1e-12, beta, 3), co);
          EXPECT_LE(TrilemmaCorollaryRaw(n, eps, delta, beta * 2, 3), co);
          EXPECT_LE(KsuLowerBound(n * 10, eps, delta), ksu);
          EXPECT_LE(KsuLowerBound(n, eps * 2, delta), ksu);
          EXPECT_LE(KsuLowerBound(n, eps, delta * 10 + 1e-12), ksu);
          // y log(1/y) with y = n eps^2 beta^2 peaks at y = 1/e, so the
          // shuffling bound only decreases below that point.
          const auto below_peak = [](int64_t n, double eps, double beta) {
            return n * eps * eps * beta * beta <= std::exp(-1.0);
          };
          if (below_peak(n * 10, eps, beta)) {
            EXPECT_LE(ShufflingLowerBoundRaw(n * 10, eps, beta), sh);
          }
          if (below_peak(n, eps * 2, beta)) {
            EXPECT_LE(ShufflingLowerBoundRaw(n, eps * 2, beta), sh);
          }
          if (below_peak(n, eps, beta * 2)) {
            EXPECT_LE(ShufflingLowerBoundRaw(n, eps, beta * 2), sh);
          }
        }
      }
    }
  }
  for (int64_t n : ns) {
    EXPECT_LT(NonprivateFloor(n * 10), NonprivateFloor(n));
  }
}

// Where delta << beta^4 eps^2, the achievable MSE sits above the squared
// lambda = 2 lower bound.
TEST(BoundsPropertyTest, Sandwich) {
  int checked = 0;
  for (int64_t n : {100, 1000, 10000, 100000}) {
    for (double eps : {0.1, 0.5, 1.0}) {
      for (double beta : {1e-3, 5e-3, 1.0 / 80}) {
        const double delta = 1e-3 * std::pow(beta, 4) * eps * eps;
        const double lower = std::pow(TrilemmaLambda2Raw(n, eps, delta, beta), 2);
        const double upper = TightnessUpperBound(n, eps, delta, beta, 1);
        EXPECT_GE(upper, lower);
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 36);
}

}  // namespace
}  // namespace dpmean
