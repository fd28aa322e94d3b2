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

#include "dpmean/population.h"

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "dpmean/noise.h"

namespace dpmean {
namespace {

std::string Num(double x) { return absl::StrFormat("%.12g", x); }

absl::Status CheckProbability(double p) {
  if (!(p >= 0 && p <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("probability must lie in [0, 1], got ", p));
  }
  return absl::OkStatus();
}

}  // namespace

Population::Population(PopulationKind kind, double p0, double p1, double p2)
    : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}

absl::StatusOr<Population> Population::PointMass(double mu) {
  if (!std::isfinite(mu)) {
    return absl::InvalidArgumentError("point mass location must be finite");
  }
  Population pop(PopulationKind::kPointMass, mu, 0, 0);
  pop.mean_ = mu;
  return pop;
}

absl::StatusOr<Population> Population::TwoPoint(double low, double high,
                                                double p) {
  if (absl::Status s = CheckProbability(p); !s.ok()) return s;
  Population pop(PopulationKind::kTwoPoint, low, high, p);
  pop.mean_ = low + p * (high - low);
  pop.variance_ = p * (1 - p) * (high - low) * (high - low);
  return pop;
}

absl::StatusOr<Population> Population::Bernoulli(double p) {
  if (absl::Status s = CheckProbability(p); !s.ok()) return s;
  Population pop(PopulationKind::kBernoulli, p, 0, 0);
  pop.mean_ = p;
  pop.variance_ = p * (1 - p);
  return pop;
}

absl::StatusOr<Population> Population::Gaussian(double mu, double sigma) {
  if (!(sigma >= 0) || !std::isfinite(mu)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "gaussian needs finite mu and sigma >= 0, got mu=", mu,
        " sigma=", sigma));
  }
  Population pop(PopulationKind::kGaussian, mu, sigma, 0);
  pop.mean_ = mu;
  pop.variance_ = sigma * sigma;
  return pop;
}

absl::StatusOr<Population> Population::Lognormal(double median,
                                                 double sigma_log) {
  if (!(median > 0) || !(sigma_log >= 0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lognormal needs median > 0 and sigma_log >= 0, got median=", median,
        " sigma_log=", sigma_log));
  }
  Population pop(PopulationKind::kLognormal, median, sigma_log, 0);
  const double s2 = sigma_log * sigma_log;
  pop.mean_ = median * std::exp(s2 / 2);
  pop.variance_ = median * median * std::exp(s2) * std::expm1(s2);
  return pop;
}

// Var = median^2 u (u - 1) with u = exp(sigma_log^2); solve for u.
absl::StatusOr<Population> Population::LognormalWithVariance(double median,
                                                             double variance) {
  if (!(median > 0) || !(variance >= 0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lognormal needs median > 0 and variance >= 0, got median=", median,
        " variance=", variance));
  }
  const double ratio = variance / (median * median);
  const double u = (1 + std::sqrt(1 + 4 * ratio)) / 2;
  return Lognormal(median, std::sqrt(std::log(u)));
}

absl::StatusOr<Population> Population::Empirical(std::vector<double> data) {
  if (data.empty()) {
    return absl::InvalidArgumentError("empirical population is empty");
  }
  Population pop(PopulationKind::kEmpirical, 0, 0, 0);
  double sum = 0.0;
  for (double x : data) sum += x;
  pop.mean_ = sum / static_cast<double>(data.size());
  double squares = 0.0;
  for (double x : data) squares += (x - pop.mean_) * (x - pop.mean_);
  pop.variance_ = squares / static_cast<double>(data.size());
  pop.records_ = std::make_shared<const std::vector<double>>(std::move(data));
  return pop;
}

std::string Population::Describe() const {
  switch (kind_) {
    case PopulationKind::kPointMass:
      return absl::StrCat("point:mu=", Num(p0_));
    case PopulationKind::kTwoPoint:
      return absl::StrCat("two-point:low=", Num(p0_), ",high=", Num(p1_),
                          ",p=", Num(p2_));
    case PopulationKind::kBernoulli:
      return absl::StrCat("bernoulli:p=", Num(p0_));
    case PopulationKind::kGaussian:
      return absl::StrCat("gaussian:mu=", Num(p0_), ",sigma=", Num(p1_));
    case PopulationKind::kLognormal:
      return absl::StrCat("lognormal:median=", Num(p0_),
                          ",sigma_log=", Num(p1_));
    case PopulationKind::kEmpirical:
      return absl::StrCat("empirical:size=", records_->size());
  }
  return "unknown";
}

double Population::Sample(NoiseSource& source) const {
  switch (kind_) {
    case PopulationKind::kPointMass:
      return p0_;
    case PopulationKind::kTwoPoint:
      return source.Bernoulli(p2_) ? p1_ : p0_;
    case PopulationKind::kBernoulli:
      return source.Bernoulli(p0_) ? 1.0 : 0.0;
    case PopulationKind::kGaussian:
      return p0_ + p1_ * source.StandardGaussian();
    case PopulationKind::kLognormal:
      return p0_ * std::exp(p1_ * source.StandardGaussian());
    case PopulationKind::kEmpirical:
      return (*records_)[source.UniformIndex(records_->size())];
  }
  return 0.0;
}

absl::StatusOr<std::vector<double>> Population::Draw(
    int64_t n, NoiseSource& source) const {
  if (n < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample size must be non-negative, got ", n));
  }
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n));
  if (kind_ != PopulationKind::kEmpirical) {
    for (int64_t i = 0; i < n; ++i) out.push_back(Sample(source));
    return out;
  }
  const size_t size = records_->size();
  if (static_cast<size_t>(n) > size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot subsample ", n, " records from a dataset of ", size));
  }
  // Fisher-Yates over a virtual index array; only displaced slots are stored.
  std::unordered_map<size_t, size_t> displaced;
  auto slot = [&displaced](size_t i) {
    auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  for (size_t i = 0; i < static_cast<size_t>(n); ++i) {
    const size_t j = i + source.UniformIndex(size - i);
    const size_t picked = slot(j);
    displaced[j] = slot(i);
    out.push_back((*records_)[picked]);
  }
  return out;
}

absl::StatusOr<Population> ParsePopulation(absl::string_view spec) {
  std::pair<absl::string_view, absl::string_view> head =
      absl::StrSplit(spec, absl::MaxSplits(':', 1));
  const absl::string_view kind = absl::StripAsciiWhitespace(head.first);
  std::map<std::string, double> params;
  if (!head.second.empty()) {
    for (absl::string_view item :
         absl::StrSplit(head.second, ',', absl::SkipWhitespace())) {
      std::pair<absl::string_view, absl::string_view> kv =
          absl::StrSplit(item, absl::MaxSplits('=', 1));
      double value;
      if (!absl::SimpleAtod(kv.second, &value)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "population parameter '", item, "' is not key=number"));
      }
      params[std::string(absl::StripAsciiWhitespace(kv.first))] = value;
    }
  }
  auto take = [&params, spec](const char* key) -> absl::StatusOr<double> {
    auto it = params.find(key);
    if (it == params.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("population '", spec, "' is missing '", key, "'"));
    }
    double v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&params, spec](absl::StatusOr<Population> pop)
      -> absl::StatusOr<Population> {
    if (pop.ok() && !params.empty()) {
      std::vector<std::string> extra;
      for (const auto& [k, v] : params) extra.push_back(k);
      return absl::InvalidArgumentError(
          absl::StrCat("population '", spec, "' has unknown parameters: ",
                       absl::StrJoin(extra, ", ")));
    }
    return pop;
  };

#define DPMEAN_TAKE(var, key)                           \
  absl::StatusOr<double> var = take(key);               \
  if (!var.ok()) return var.status()

  if (kind == "point") {
    DPMEAN_TAKE(mu, "mu");
    return finish(Population::PointMass(*mu));
  }
  if (kind == "two-point") {
    DPMEAN_TAKE(low, "low");
    DPMEAN_TAKE(high, "high");
    DPMEAN_TAKE(p, "p");
    return finish(Population::TwoPoint(*low, *high, *p));
  }
  if (kind == "bernoulli") {
    DPMEAN_TAKE(p, "p");
    return finish(Population::Bernoulli(*p));
  }
  if (kind == "gaussian") {
    DPMEAN_TAKE(mu, "mu");
    DPMEAN_TAKE(sigma, "sigma");
    return finish(Population::Gaussian(*mu, *sigma));
  }
  if (kind == "lognormal") {
    DPMEAN_TAKE(median, "median");
    if (params.count("variance") > 0) {
      DPMEAN_TAKE(variance, "variance");
      return finish(Population::LognormalWithVariance(*median, *variance));
    }
    DPMEAN_TAKE(sigma_log, "sigma_log");
    return finish(Population::Lognormal(*median, *sigma_log));
  }
#undef DPMEAN_TAKE
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown population kind '", kind,
      "'; expected point, two-point, bernoulli, gaussian or lognormal"));
}

}  // namespace dpmean
