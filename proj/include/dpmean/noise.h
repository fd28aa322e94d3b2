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

#ifndef DPMEAN_NOISE_H_
#define DPMEAN_NOISE_H_

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "absl/status/statusor.h"

namespace dpmean {

// Source of every random draw consumed by a mechanism or a population
// sampler. Mechanisms validate their own parameters before calling the raw
// draw methods, so implementations may assume valid arguments.
//
// Tests substitute scripted implementations to pin the noise of a mechanism
// to exact values (zero noise, mirrored noise, forced failures).
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;

  // Uniform on [0, 1).
  virtual double Uniform() = 0;
  // Uniform on [-1/2, +1/2).
  virtual double UniformOffset() = 0;
  virtual double StandardGaussian() = 0;
  // Laplace with location 0 and the given scale > 0.
  virtual double Laplace(double scale) = 0;
  // Pr[Z = z] proportional to exp(-epsilon * |z|).
  virtual int64_t DiscreteLaplace(double epsilon) = 0;
  virtual double StudentT(int degrees_of_freedom) = 0;
  virtual bool Bernoulli(double p) = 0;
  // Uniform on {0, ..., bound - 1}; bound >= 1.
  virtual uint64_t UniformIndex(uint64_t bound) = 0;

  // Returns an independent child source. Children with distinct indices
  // never share output.
  virtual std::unique_ptr<NoiseSource> Split(uint64_t index) = 0;
};

// Seedable, splittable stream. Identical (seed, path) pairs produce
// bit-identical sample sequences for every sampler.
class NoiseStream final : public NoiseSource {
 public:
  explicit NoiseStream(uint64_t seed, std::vector<uint64_t> path = {});

  NoiseStream(const NoiseStream&) = delete;
  NoiseStream& operator=(const NoiseStream&) = delete;
  NoiseStream(NoiseStream&&) = default;
  NoiseStream& operator=(NoiseStream&&) = default;

  uint64_t seed() const { return seed_; }
  const std::vector<uint64_t>& path() const { return path_; }

  // Child stream at path() + {index}. Does not advance this stream.
  NoiseStream Child(uint64_t index) const;

  double Uniform() override;
  double UniformOffset() override;
  double StandardGaussian() override;
  double Laplace(double scale) override;
  int64_t DiscreteLaplace(double epsilon) override;
  double StudentT(int degrees_of_freedom) override;
  bool Bernoulli(double p) override;
  uint64_t UniformIndex(uint64_t bound) override;
  std::unique_ptr<NoiseSource> Split(uint64_t index) override;

 private:
  // Uniform on the open interval (0, 1).
  double OpenUniform();

  uint64_t seed_;
  std::vector<uint64_t> path_;
  std::mt19937_64 engine_;
};

// Inverse CDF of the Laplace distribution at u in (0, 1).
double LaplaceFromUniform(double u, double scale);

// Validated sampler entry points. Each returns InvalidArgument on a bad
// parameter and otherwise draws exactly one value from `source`.
absl::StatusOr<double> LaplaceSample(double scale, NoiseSource& source);
absl::StatusOr<int64_t> DiscreteLaplaceSample(double epsilon,
                                              NoiseSource& source);
absl::StatusOr<double> StudentTSample(int degrees_of_freedom,
                                      NoiseSource& source);
absl::StatusOr<bool> BernoulliSample(double p, NoiseSource& source);
double UniformOffsetSample(NoiseSource& source);

// Probability mass of the discrete Laplace distribution at z.
double DiscreteLaplacePmf(int64_t z, double epsilon);

}  // namespace dpmean

#endif  // DPMEAN_NOISE_H_
