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
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "boost/random/normal_distribution.hpp"
#include "boost/random/uniform_int_distribution.hpp"

namespace dpmean {
namespace {

constexpr double kTwoPow53 = 9007199254740992.0;
constexpr double kTwoPow32 = 4294967296.0;

std::mt19937_64 MakeEngine(uint64_t seed, const std::vector<uint64_t>& path) {
  std::vector<uint32_t> words;
  words.reserve(3 + 2 * path.size());
  words.push_back(static_cast<uint32_t>(seed));
  words.push_back(static_cast<uint32_t>(seed >> 32));
  words.push_back(static_cast<uint32_t>(path.size()));
  for (uint64_t step : path) {
    words.push_back(static_cast<uint32_t>(step));
    words.push_back(static_cast<uint32_t>(step >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

NoiseStream::NoiseStream(uint64_t seed, std::vector<uint64_t> path)
    : seed_(seed), path_(std::move(path)), engine_(MakeEngine(seed_, path_)) {}

NoiseStream NoiseStream::Child(uint64_t index) const {
  std::vector<uint64_t> child_path = path_;
  child_path.push_back(index);
  return NoiseStream(seed_, std::move(child_path));
}

std::unique_ptr<NoiseSource> NoiseStream::Split(uint64_t index) {
  return std::make_unique<NoiseStream>(Child(index));
}

double NoiseStream::Uniform() {
  return static_cast<double>(engine_() >> 11) / kTwoPow53;
}

double NoiseStream::OpenUniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) / kTwoPow53;
}

// The offset lives on a 2^-32 lattice so that offset + k is exact for every
// bin index |k| < 2^20.
double NoiseStream::UniformOffset() {
  return static_cast<double>(engine_() >> 32) / kTwoPow32 - 0.5;
}

double NoiseStream::StandardGaussian() {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine_);
}

double NoiseStream::Laplace(double scale) {
  return LaplaceFromUniform(OpenUniform(), scale);
}

// Difference of two i.i.d. geometric variables with ratio exp(-epsilon).
int64_t NoiseStream::DiscreteLaplace(double epsilon) {
  auto geometric = [this, epsilon]() -> int64_t {
    return static_cast<int64_t>(std::floor(-std::log(OpenUniform()) / epsilon));
  };
  const int64_t first = geometric();
  const int64_t second = geometric();
  return first - second;
}

// Standard normal over the root of a chi-square scaled by its degrees of
// freedom.
double NoiseStream::StudentT(int degrees_of_freedom) {
  const double numerator = StandardGaussian();
  double chi_square = 0.0;
  for (int i = 0; i < degrees_of_freedom; ++i) {
    const double g = StandardGaussian();
    chi_square += g * g;
  }
  return numerator / std::sqrt(chi_square / degrees_of_freedom);
}

bool NoiseStream::Bernoulli(double p) { return Uniform() < p; }

uint64_t NoiseStream::UniformIndex(uint64_t bound) {
  boost::random::uniform_int_distribution<uint64_t> index(0, bound - 1);
  return index(engine_);
}

double LaplaceFromUniform(double u, double scale) {
  const double centered = u - 0.5;
  if (centered == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(centered));
  return centered < 0 ? -magnitude : magnitude;
}

absl::StatusOr<double> LaplaceSample(double scale, NoiseSource& source) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be finite and positive, got ", scale));
  }
  return source.Laplace(scale);
}

absl::StatusOr<int64_t> DiscreteLaplaceSample(double epsilon,
                                              NoiseSource& source) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Discrete Laplace epsilon must be finite and positive, got ",
        epsilon));
  }
  return source.DiscreteLaplace(epsilon);
}

absl::StatusOr<double> StudentTSample(int degrees_of_freedom,
                                      NoiseSource& source) {
  if (degrees_of_freedom < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("Student-t degrees of freedom must be at least 1, got ",
                     degrees_of_freedom));
  }
  return source.StudentT(degrees_of_freedom);
}

absl::StatusOr<bool> BernoulliSample(double p, NoiseSource& source) {
  if (!(p >= 0 && p <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bernoulli probability must lie in [0, 1], got ", p));
  }
  return source.Bernoulli(p);
}

double UniformOffsetSample(NoiseSource& source) {
  return source.UniformOffset();
}

double DiscreteLaplacePmf(int64_t z, double epsilon) {
  const double magnitude = static_cast<double>(z < 0 ? -z : z);
  return std::exp(-epsilon * magnitude) * std::expm1(epsilon) /
         (std::exp(epsilon) + 1.0);
}

}  // namespace dpmean
