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

#include "dpmean/noise.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "status_matchers.h"

namespace dpmean {
namespace {

using ::dpmean::testing::IsOk;
using ::dpmean::testing::StatusIs;
using ::testing::DoubleNear;
using ::testing::Ge;
using ::testing::Lt;

constexpr int kDraws = 1000000;

struct Moments {
  double mean = 0;
  double variance = 0;
  double skewness = 0;
};

Moments Measure(const std::vector<double>& xs) {
  long double sum = 0;
  for (double x : xs) sum += x;
  const long double mean = sum / xs.size();
  long double m2 = 0, m3 = 0;
  for (double x : xs) {
    const long double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= xs.size();
  m3 /= xs.size();
  return {static_cast<double>(mean), static_cast<double>(m2),
          static_cast<double>(m3 / std::pow(m2, 1.5L))};
}

TEST(NoiseStreamTest, SameSeedAndPathReproduceEverySampler) {
  NoiseStream a(42, {3, 1});
  NoiseStream b(42, {3, 1});
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(a.Uniform(), b.Uniform());
    EXPECT_EQ(a.UniformOffset(), b.UniformOffset());
    EXPECT_EQ(a.StandardGaussian(), b.StandardGaussian());
    EXPECT_EQ(a.Laplace(1.5), b.Laplace(1.5));
    EXPECT_EQ(a.DiscreteLaplace(0.3), b.DiscreteLaplace(0.3));
    EXPECT_EQ(a.StudentT(3), b.StudentT(3));
    EXPECT_EQ(a.Bernoulli(0.4), b.Bernoulli(0.4));
    EXPECT_EQ(a.UniformIndex(17), b.UniformIndex(17));
  }
}

TEST(NoiseStreamTest, ChildrenDoNotShareAPrefix) {
  NoiseStream parent(7);
  NoiseStream left = parent.Child(0);
  NoiseStream right = parent.Child(1);
  NoiseStream other_seed(8, {0});
  std::vector<double> l, r, o;
  for (int i = 0; i < 64; ++i) {
    l.push_back(left.Uniform());
    r.push_back(right.Uniform());
    o.push_back(other_seed.Uniform());
  }
  EXPECT_NE(l, r);
  EXPECT_NE(l, o);
  for (int i = 0; i < 64; ++i) EXPECT_NE(l[i], r[i]);
}

TEST(NoiseStreamTest, ChildDoesNotAdvanceParent) {
  NoiseStream a(5);
  NoiseStream b(5);
  a.Child(3);
  std::unique_ptr<NoiseSource> split = a.Split(4);
  EXPECT_EQ(a.Uniform(), b.Uniform());
}

TEST(NoiseStreamTest, SplitMatchesChild) {
  NoiseStream root(11, {2});
  std::unique_ptr<NoiseSource> split = root.Split(9);
  NoiseStream direct(11, {2, 9});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(split->Uniform(), direct.Uniform());
}

TEST(NoiseStreamTest, SplitChildrenAreUncorrelated) {
  NoiseStream root(99);
  NoiseStream a = root.Child(0);
  NoiseStream b = root.Child(1);
  const int draws = 100000;
  double sab = 0, sa = 0, sb = 0;
  for (int i = 0; i < draws; ++i) {
    const double x = a.Uniform() - 0.5;
    const double y = b.Uniform() - 0.5;
    sab += x * y;
    sa += x * x;
    sb += y * y;
  }
  const double correlation = sab / std::sqrt(sa * sb);
  // Four standard errors of a null correlation.
  EXPECT_LT(std::abs(correlation), 4 / std::sqrt(draws));
}

TEST(LaplaceTest, MedianOfInverseCdfIsZero) {
  EXPECT_EQ(LaplaceFromUniform(0.5, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(LaplaceFromUniform(0.75, 1.0), std::log(2.0));
  EXPECT_DOUBLE_EQ(LaplaceFromUniform(0.25, 1.0), -std::log(2.0));
}

TEST(LaplaceTest, VarianceAtScaleTwo) {
  NoiseStream s(1);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = s.Laplace(2.0);
  const Moments m = Measure(xs);
  EXPECT_THAT(m.mean, DoubleNear(0, 0.01));
  EXPECT_THAT(m.variance, DoubleNear(8, 0.1));
}

TEST(LaplaceTest, TailFrequencyMatchesBeta) {
  NoiseStream s(2);
  const double scale = 3.0;
  const double cutoff = scale * std::log(1 / 0.1);
  int tail = 0;
  for (int i = 0; i < kDraws; ++i) {
    if (std::abs(s.Laplace(scale)) >= cutoff) ++tail;
  }
  EXPECT_THAT(static_cast<double>(tail) / kDraws, DoubleNear(0.1, 0.005));
}

TEST(LaplaceTest, RejectsBadScale) {
  NoiseStream s(0);
  EXPECT_THAT(LaplaceSample(0.0, s), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(LaplaceSample(-1.0, s), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(LaplaceSample(NAN, s), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(LaplaceSample(1.0, s), IsOk());
}

TEST(DiscreteLaplaceTest, MassAtZeroForLogTwo) {
  NoiseStream s(3);
  const double eps = std::log(2.0);
  int zeros = 0, far = 0;
  for (int i = 0; i < kDraws; ++i) {
    const int64_t z = s.DiscreteLaplace(eps);
    if (z == 0) ++zeros;
    if (z >= 3 || z <= -3) ++far;
  }
  EXPECT_THAT(static_cast<double>(zeros) / kDraws, DoubleNear(1.0 / 3, 0.002));
  // 2 sum_{z >= 3} 2^-z / 3 = 1/6.
  EXPECT_THAT(static_cast<double>(far) / kDraws, DoubleNear(1.0 / 6, 0.002));
}

TEST(DiscreteLaplaceTest, PmfMatchesDirectFormula) {
  const double eps = std::log(2.0);
  EXPECT_DOUBLE_EQ(DiscreteLaplacePmf(0, eps), 1.0 / 3);
  EXPECT_DOUBLE_EQ(DiscreteLaplacePmf(2, eps), 1.0 / 12);
  EXPECT_DOUBLE_EQ(DiscreteLaplacePmf(-2, eps), 1.0 / 12);
}

TEST(DiscreteLaplaceTest, PmfIsNormalized) {
  const double eps = std::log(2.0);
  long double total = 0;
  for (int64_t z = -50; z <= 50; ++z) total += DiscreteLaplacePmf(z, eps);
  EXPECT_GT(static_cast<double>(total), 1 - 1e-12);
  EXPECT_LT(std::abs(static_cast<double>(total) - 1), 1e-12);
}

TEST(DiscreteLaplaceTest, EmpiricalFrequenciesMatchPmf) {
  NoiseStream s(4);
  const double eps = 0.7;
  std::vector<int> counts(21, 0);
  for (int i = 0; i < kDraws; ++i) {
    const int64_t z = s.DiscreteLaplace(eps);
    if (z >= -10 && z <= 10) ++counts[z + 10];
  }
  for (int64_t z = -10; z <= 10; ++z) {
    const double p = DiscreteLaplacePmf(z, eps);
    const double se = std::sqrt(p * (1 - p) / kDraws);
    EXPECT_THAT(static_cast<double>(counts[z + 10]) / kDraws,
                DoubleNear(p, 5 * se + 1e-6))
        << "z=" << z;
  }
}

TEST(DiscreteLaplaceTest, RejectsBadEpsilon) {
  NoiseStream s(0);
  EXPECT_THAT(DiscreteLaplaceSample(0.0, s),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(DiscreteLaplaceSample(INFINITY, s),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(StudentTTest, ThreeDegreesOfFreedomMoments) {
  NoiseStream s(5);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = s.StudentT(3);
  const Moments m = Measure(xs);
  EXPECT_THAT(m.mean, DoubleNear(0, 0.01));
  EXPECT_THAT(m.variance, DoubleNear(3, 0.1));
}

// The third moment of t(3) diverges, so its sample skewness does not settle.
// Symmetry is checked through tail frequencies instead.
TEST(StudentTTest, ThreeDegreesOfFreedomIsSymmetric) {
  NoiseStream s(6);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = s.StudentT(3);
  for (double q : {0.5, 1.0, 2.0, 5.0}) {
    int upper = 0, lower = 0;
    for (double x : xs) {
      upper += x > q;
      lower += x < -q;
    }
    const double p = static_cast<double>(upper + lower) / (2 * kDraws);
    const double se = std::sqrt(2 * p / kDraws);
    EXPECT_LT(std::abs(upper - lower) / static_cast<double>(kDraws), 4 * se)
        << "q=" << q;
  }
}

TEST(StudentTTest, SevenDegreesOfFreedomSkewness) {
  NoiseStream s(6);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = s.StudentT(7);
  const Moments m = Measure(xs);
  EXPECT_THAT(m.variance, DoubleNear(7.0 / 5, 0.02));
  EXPECT_THAT(m.skewness, DoubleNear(0, 0.05));
}

TEST(StudentTTest, RejectsZeroDegrees) {
  NoiseStream s(0);
  EXPECT_THAT(StudentTSample(0, s), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(StudentTSample(1, s), IsOk());
}

TEST(BernoulliTest, DegenerateProbabilities) {
  NoiseStream s(7);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_FALSE(*BernoulliSample(0.0, s));
    EXPECT_TRUE(*BernoulliSample(1.0, s));
  }
}

TEST(BernoulliTest, FrequencyAtPointThree) {
  NoiseStream s(8);
  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += s.Bernoulli(0.3);
  EXPECT_THAT(static_cast<double>(ones) / kDraws, DoubleNear(0.3, 0.002));
}

TEST(BernoulliTest, RejectsOutOfRange) {
  NoiseStream s(0);
  EXPECT_THAT(BernoulliSample(-0.1, s), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(BernoulliSample(1.5, s), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(UniformOffsetTest, RangeAndMoments) {
  NoiseStream s(9);
  std::vector<double> xs(kDraws);
  for (double& x : xs) {
    x = UniformOffsetSample(s);
    ASSERT_THAT(x, Ge(-0.5));
    ASSERT_THAT(x, Lt(0.5));
    // Lies on the 2^-32 lattice.
    ASSERT_EQ(std::ldexp(x, 32), std::floor(std::ldexp(x, 32)));
  }
  const Moments m = Measure(xs);
  EXPECT_THAT(m.mean, DoubleNear(0, 0.001));
  EXPECT_THAT(m.variance, DoubleNear(1.0 / 12, 0.001));
}

TEST(UniformIndexTest, CoversRangeUniformly) {
  NoiseStream s(10);
  std::vector<int> counts(5, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const uint64_t k = s.UniformIndex(5);
    ASSERT_LT(k, 5u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_THAT(c / static_cast<double>(draws), DoubleNear(0.2, 0.006));
  EXPECT_EQ(s.UniformIndex(1), 0u);
}

TEST(GaussianTest, StandardMoments) {
  NoiseStream s(12);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = s.StandardGaussian();
  const Moments m = Measure(xs);
  EXPECT_THAT(m.mean, DoubleNear(0, 0.005));
  EXPECT_THAT(m.variance, DoubleNear(1, 0.01));
  EXPECT_THAT(m.skewness, DoubleNear(0, 0.02));
}

}  // namespace
}  // namespace dpmean
