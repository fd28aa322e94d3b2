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

#include "dpmean/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpmean/mechanisms.h"
#include "dpmean/noise.h"
#include "dpmean/population.h"
#include "dpmean/symmetric.h"

namespace dpmean {
namespace {

constexpr size_t kPairwiseBlock = 8;

int ResolveThreads(int requested, int64_t trials) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(threads, 1);
  return static_cast<int>(std::min<int64_t>(threads, std::max<int64_t>(trials, 1)));
}

}  // namespace

double PairwiseSum(std::span<const double> values) {
  if (values.size() <= kPairwiseBlock) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

absl::StatusOr<std::vector<std::optional<double>>> RunTrials(
    const MeanMechanism& mechanism, const Population& population, int64_t n,
    const MonteCarloOptions& options) {
  if (options.trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be positive, got ", options.trials));
  }
  if (population.kind() == PopulationKind::kEmpirical &&
      static_cast<size_t>(n) > population.records().size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("n=", n, " exceeds the dataset size ",
                     population.records().size()));
  }
  const int64_t trials = options.trials;
  std::vector<std::optional<double>> outputs(static_cast<size_t>(trials));
  const int threads = ResolveThreads(options.threads, trials);
  std::vector<absl::Status> statuses(static_cast<size_t>(threads));

  auto work = [&](int worker) {
    const int64_t begin = trials * worker / threads;
    const int64_t end = trials * (worker + 1) / threads;
    for (int64_t t = begin; t < end; ++t) {
      const uint64_t trial = static_cast<uint64_t>(t);
      NoiseStream data_stream(options.seed, {options.row_id, trial, 0});
      NoiseStream mech_stream(options.seed, {options.row_id, trial, 1});
      absl::StatusOr<std::vector<double>> data =
          population.Draw(n, data_stream);
      if (!data.ok()) {
        statuses[worker] = data.status();
        return;
      }
      absl::StatusOr<EstimateOutcome> outcome = mechanism(*data, mech_stream);
      if (!outcome.ok()) {
        statuses[worker] = outcome.status();
        return;
      }
      outputs[static_cast<size_t>(t)] = outcome->value;
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (std::thread& thread : pool) thread.join();
  }
  for (const absl::Status& status : statuses) {
    if (!status.ok()) return status;
  }
  return outputs;
}

TrialStats Summarize(std::span<const std::optional<double>> outputs,
                     double truth) {
  TrialStats stats;
  stats.trials = static_cast<int64_t>(outputs.size());
  std::vector<double> values;
  values.reserve(outputs.size());
  for (const std::optional<double>& v : outputs) {
    if (v.has_value()) values.push_back(*v);
  }
  stats.failures = stats.trials - static_cast<int64_t>(values.size());
  const double m = static_cast<double>(values.size());
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    stats.mean = stats.bias = stats.bias_ci = nan;
    stats.se = stats.rmse = stats.rmse_ci = nan;
    return stats;
  }

  stats.mean = PairwiseSum(values) / m;
  stats.bias = stats.mean - truth;

  std::vector<double> scratch(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - stats.mean;
    scratch[i] = d * d;
  }
  const double centered = PairwiseSum(scratch);

  std::vector<double> squared_errors(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double e = values[i] - truth;
    squared_errors[i] = e * e;
  }
  const double mse = PairwiseSum(squared_errors) / m;
  stats.rmse = std::sqrt(mse);

  if (values.size() < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    stats.se = stats.bias_ci = stats.rmse_ci = nan;
    return stats;
  }
  stats.se = std::sqrt(centered / (m - 1));
  stats.bias_ci = kNormalQuantile975 * stats.se / std::sqrt(m);

  for (size_t i = 0; i < values.size(); ++i) {
    const double d = squared_errors[i] - mse;
    scratch[i] = d * d;
  }
  const double mse_ci =
      kNormalQuantile975 * std::sqrt(PairwiseSum(scratch) / (m - 1) / m);
  stats.rmse_ci = stats.rmse > 0 ? mse_ci / (2 * stats.rmse) : 0.0;
  return stats;
}

absl::StatusOr<TrialStats> MonteCarlo(const MeanMechanism& mechanism,
                                      const Population& population, int64_t n,
                                      const MonteCarloOptions& options) {
  if (options.trials < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("Monte Carlo needs at least 2 trials, got ",
                     options.trials));
  }
  absl::StatusOr<std::vector<std::optional<double>>> outputs =
      RunTrials(mechanism, population, n, options);
  if (!outputs.ok()) return outputs.status();
  return Summarize(*outputs, population.mean());
}

// Rows sharing an epsilon share random streams, so the threshold comparison
// within an epsilon uses common random numbers.
absl::StatusOr<SweepReport> ThresholdSweep(const Population& population,
                                           const ThresholdSweepConfig& config) {
  if (config.thresholds.empty() || config.epsilons.empty()) {
    return absl::InvalidArgumentError(
        "threshold and epsilon grids must be non-empty");
  }
  SweepReport report;
  for (size_t e = 0; e < config.epsilons.size(); ++e) {
    const double epsilon = config.epsilons[e];
    for (double threshold : config.thresholds) {
      MeanMechanism mechanism = [threshold, epsilon](
                                    std::span<const double> data,
                                    NoiseSource& source) {
        return ThresholdClippedMean(data, threshold, epsilon, source);
      };
      MonteCarloOptions options;
      options.trials = config.trials;
      options.seed = config.seed;
      options.row_id = e;
      options.threads = config.threads;
      absl::StatusOr<TrialStats> stats =
          MonteCarlo(mechanism, population, config.n, options);
      if (!stats.ok()) return stats.status();
      report.rows.push_back(
          SweepRow{"threshold", epsilon, 0.0, threshold, *stats});
    }
  }
  return report;
}

std::vector<SweepRow> OptimalThresholds(const SweepReport& report) {
  std::vector<SweepRow> best;
  for (const SweepRow& row : report.rows) {
    auto it = std::find_if(best.begin(), best.end(), [&row](const SweepRow& b) {
      return b.mechanism == row.mechanism && b.epsilon == row.epsilon &&
             b.delta == row.delta;
    });
    if (it == best.end()) {
      best.push_back(row);
      continue;
    }
    const bool better =
        row.stats.rmse < it->stats.rmse ||
        (row.stats.rmse == it->stats.rmse && row.param < it->param);
    if (better) *it = row;
  }
  return best;
}

absl::StatusOr<SweepReport> KvBiasSweep(const KvSweepConfig& config) {
  if (config.mu_grid.empty()) {
    return absl::InvalidArgumentError("mu grid must be non-empty");
  }
  FineParams params;
  params.epsilon = config.epsilon;
  params.delta = config.delta;
  params.c = config.c;
  params.sigma = config.sigma;
  params.n1 = config.n1;
  params.n2 = config.n2;
  const MeanMechanism ours = [params](std::span<const double> data,
                                      NoiseSource& source) {
    return FineEstimate(data, params, source);
  };
  const MeanMechanism kv = [params](std::span<const double> data,
                                    NoiseSource& source) {
    return KvFineEstimate(data, params, source);
  };

  SweepReport report;
  for (size_t i = 0; i < config.mu_grid.size(); ++i) {
    const double mu = config.mu_grid[i];
    absl::StatusOr<Population> population = Population::Gaussian(mu, 1.0);
    if (!population.ok()) return population.status();
    MonteCarloOptions options;
    options.trials = config.trials;
    options.seed = config.seed;
    options.row_id = i;
    options.threads = config.threads;
    for (const auto& [name, mechanism] :
         {std::pair<const char*, const MeanMechanism*>{"fine", &ours},
          std::pair<const char*, const MeanMechanism*>{"kv-fine", &kv}}) {
      absl::StatusOr<TrialStats> stats =
          MonteCarlo(*mechanism, *population, config.n1 + config.n2, options);
      if (!stats.ok()) return stats.status();
      report.rows.push_back(
          SweepRow{name, config.epsilon, config.delta, mu, *stats});
    }
  }
  return report;
}

absl::StatusOr<Histogram> SamplingHistogram(const Population& dataset,
                                            const MeanMechanism& mechanism,
                                            int64_t n, int64_t trials, int bins,
                                            double lo, double hi,
                                            uint64_t seed, int threads) {
  if (bins < 1 || !(lo < hi)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "histogram needs bins >= 1 and lo < hi, got bins=", bins, " range=[",
        lo, ", ", hi, "]"));
  }
  MonteCarloOptions options;
  options.trials = trials;
  options.seed = seed;
  options.threads = threads;
  absl::StatusOr<std::vector<std::optional<double>>> outputs =
      RunTrials(mechanism, dataset, n, options);
  if (!outputs.ok()) return outputs.status();

  Histogram histogram;
  histogram.dataset_mean = dataset.mean();
  histogram.counts.assign(static_cast<size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) histogram.edges.push_back(lo + i * width);
  histogram.edges.back() = hi;
  for (const std::optional<double>& v : *outputs) {
    if (!v.has_value()) {
      ++histogram.failures;
      continue;
    }
    const double position = std::floor((*v - lo) / width);
    const int bin = static_cast<int>(
        std::clamp(position, 0.0, static_cast<double>(bins - 1)));
    ++histogram.counts[static_cast<size_t>(bin)];
  }
  return histogram;
}

bool HasInteriorDip(const Histogram& histogram, double min_peak_fraction,
                    double dip_ratio) {
  const std::vector<int64_t>& c = histogram.counts;
  int64_t total = 0;
  for (int64_t v : c) total += v;
  if (total == 0) return false;
  const double peak_floor = min_peak_fraction * static_cast<double>(total);
  for (size_t i = 0; i < c.size(); ++i) {
    if (static_cast<double>(c[i]) < peak_floor) continue;
    int64_t valley = std::numeric_limits<int64_t>::max();
    for (size_t k = i + 1; k < c.size(); ++k) {
      if (valley != std::numeric_limits<int64_t>::max() &&
          static_cast<double>(c[k]) >= peak_floor &&
          static_cast<double>(valley) <
              dip_ratio * static_cast<double>(std::min(c[i], c[k]))) {
        return true;
      }
      valley = std::min(valley, c[k]);
    }
  }
  return false;
}

double SampleSkewness(std::span<const double> values) {
  if (values.size() < 3) return 0.0;
  const double m = static_cast<double>(values.size());
  const double mean = PairwiseSum(values) / m;
  std::vector<double> second(values.size());
  std::vector<double> third(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    second[i] = d * d;
    third[i] = d * d * d;
  }
  const double m2 = PairwiseSum(second) / m;
  const double m3 = PairwiseSum(third) / m;
  if (m2 == 0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

}  // namespace dpmean
