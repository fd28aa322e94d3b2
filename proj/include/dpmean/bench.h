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

#ifndef DPMEAN_BENCH_H_
#define DPMEAN_BENCH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmean/mechanisms.h"
#include "dpmean/population.h"

namespace dpmean {

inline constexpr double kNormalQuantile975 = 1.959963984540054;

// Moments of the successful outputs of a Monte Carlo run. Failed trials are
// counted but excluded from every moment.
struct TrialStats {
  int64_t trials = 0;
  int64_t failures = 0;
  double mean = 0.0;
  double bias = 0.0;
  // Half-width of the normal-approximation 95% interval for the bias.
  double bias_ci = 0.0;
  // Sample standard deviation of the estimates (denominator M - 1).
  double se = 0.0;
  double rmse = 0.0;
  // Delta-method 95% half-width for the RMSE.
  double rmse_ci = 0.0;

  int64_t successes() const { return trials - failures; }
};

struct SweepRow {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  // Clipping threshold, true mean, or other swept parameter.
  double param = 0.0;
  TrialStats stats;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

struct MonteCarloOptions {
  int64_t trials = 5000;
  uint64_t seed = 0;
  // Distinguishes rows of a sweep so that every row sees fresh randomness.
  uint64_t row_id = 0;
  // 0 selects std::thread::hardware_concurrency().
  int threads = 0;
};

// Pairwise (cascade) summation.
double PairwiseSum(std::span<const double> values);

// Trial t draws its data from NoiseStream(seed, {row_id, t, 0}) and runs the
// mechanism on NoiseStream(seed, {row_id, t, 1}). Output t is nullopt when the
// mechanism fails. The result does not depend on the thread count.
absl::StatusOr<std::vector<std::optional<double>>> RunTrials(
    const MeanMechanism& mechanism, const Population& population, int64_t n,
    const MonteCarloOptions& options);

// Summary of outputs against the true mean. Needs at least two successes for
// finite standard errors.
TrialStats Summarize(std::span<const std::optional<double>> outputs,
                     double truth);

absl::StatusOr<TrialStats> MonteCarlo(const MeanMechanism& mechanism,
                                      const Population& population, int64_t n,
                                      const MonteCarloOptions& options);

struct ThresholdSweepConfig {
  std::vector<double> thresholds;
  std::vector<double> epsilons;
  int64_t n = 500;
  int64_t trials = 5000;
  uint64_t seed = 0;
  int threads = 0;
};

// Cross product of ThresholdClippedMean runs, rows ordered by epsilon then
// threshold. Empirical populations are subsampled without replacement.
absl::StatusOr<SweepReport> ThresholdSweep(const Population& population,
                                           const ThresholdSweepConfig& config);

// The RMSE-minimizing row for each epsilon, in first-appearance order. Ties go
// to the smaller parameter.
std::vector<SweepRow> OptimalThresholds(const SweepReport& report);

struct KvSweepConfig {
  std::vector<double> mu_grid;
  int64_t n1 = 200;
  int64_t n2 = 200;
  double sigma = 1.0;
  double c = 2.0;
  double epsilon = 1.0;
  double delta = 1e-3;
  int64_t trials = 20000;
  uint64_t seed = 0;
  int threads = 0;
};

// For every mu, one "fine" row (randomly offset bins) and one "kv-fine" row
// (fixed bins) on N(mu, 1)^{n1 + n2}. Both rows of a grid point share data
// streams.
absl::StatusOr<SweepReport> KvBiasSweep(const KvSweepConfig& config);

struct Histogram {
  std::vector<double> edges;
  std::vector<int64_t> counts;
  int64_t failures = 0;
  double dataset_mean = 0.0;
};

// Histogram of mechanism outputs over `trials` subsamples of size n. Bins
// span [lo, hi]; outputs outside are clamped into the end bins.
absl::StatusOr<Histogram> SamplingHistogram(const Population& dataset,
                                            const MeanMechanism& mechanism,
                                            int64_t n, int64_t trials, int bins,
                                            double lo, double hi,
                                            uint64_t seed, int threads = 0);

// True when two bins each hold at least `min_peak_fraction` of the mass and
// some bin between them holds less than `dip_ratio` times the smaller peak.
bool HasInteriorDip(const Histogram& histogram, double min_peak_fraction,
                    double dip_ratio);

double SampleSkewness(std::span<const double> values);

}  // namespace dpmean

#endif  // DPMEAN_BENCH_H_
