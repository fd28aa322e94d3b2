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

#ifndef DPMEAN_POPULATION_H_
#define DPMEAN_POPULATION_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpmean/noise.h"

namespace dpmean {

enum class PopulationKind {
  kPointMass,
  kTwoPoint,
  kBernoulli,
  kGaussian,
  kLognormal,
  kEmpirical,
};

// A data-generating distribution with a known mean. Empirical populations
// are finite datasets; Draw() subsamples them without replacement.
class Population {
 public:
  static absl::StatusOr<Population> PointMass(double mu);
  // `high` with probability p, else `low`.
  static absl::StatusOr<Population> TwoPoint(double low, double high, double p);
  static absl::StatusOr<Population> Bernoulli(double p);
  static absl::StatusOr<Population> Gaussian(double mu, double sigma);
  // exp(N(ln median, sigma_log^2)).
  static absl::StatusOr<Population> Lognormal(double median, double sigma_log);
  // Lognormal with the given median and raw-scale variance.
  static absl::StatusOr<Population> LognormalWithVariance(double median,
                                                          double variance);
  static absl::StatusOr<Population> Empirical(std::vector<double> data);

  PopulationKind kind() const { return kind_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  // Canonical spec string, parseable by ParsePopulation for every kind except
  // empirical.
  std::string Describe() const;

  // One i.i.d. draw. Not available for empirical populations.
  double Sample(NoiseSource& source) const;
  // n i.i.d. draws, or n distinct records in uniformly random order for an
  // empirical population.
  absl::StatusOr<std::vector<double>> Draw(int64_t n, NoiseSource& source) const;

  const std::vector<double>& records() const { return *records_; }

 private:
  Population(PopulationKind kind, double p0, double p1, double p2);

  PopulationKind kind_;
  // Kind-specific parameters.
  double p0_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::shared_ptr<const std::vector<double>> records_;
};

// Parses "kind:key=value,key=value". Kinds and keys:
//   point:mu            two-point:low,high,p   bernoulli:p
//   gaussian:mu,sigma   lognormal:median,sigma_log (or median,variance)
absl::StatusOr<Population> ParsePopulation(absl::string_view spec);

}  // namespace dpmean

#endif  // DPMEAN_POPULATION_H_
