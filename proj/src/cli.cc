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

#include "dpmean/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "dpmean/bench.h"
#include "dpmean/bounds.h"
#include "dpmean/csv.h"
#include "dpmean/mechanisms.h"
#include "dpmean/noise.h"
#include "dpmean/population.h"
#include "dpmean/symmetric.h"
#include "dpmean/unknown-size.h"

namespace dpmean {
namespace {

constexpr char kSeedEnv[] = "DP_TRILEMMA_SEED";

const std::vector<std::string>& CommonKeys() {
  static const auto* keys =
      new std::vector<std::string>{"preset", "seed", "threads"};
  return *keys;
}

const std::map<std::string, std::vector<std::string>>& SubcommandKeys() {
  static const auto* keys = new std::map<std::string, std::vector<std::string>>{
      {"estimate",
       {"mech", "eps", "delta", "beta", "lambda", "psi", "a", "b", "threshold",
        "n0", "c", "sigma", "n1", "input", "column", "pop", "n"}},
      {"sweep",
       {"kind", "pop", "input", "column", "n", "trials", "eps-grid",
        "thresholds", "optimal-only", "mu-grid", "n1", "sigma", "c", "eps",
        "delta", "mechs", "dataset-size", "bins", "hist-lo", "hist-hi"}},
      {"bounds",
       {"bound", "n-grid", "eps-grid", "delta-grid", "beta-grid", "gamma-grid",
        "lambda", "psi", "tau", "kappa"}},
  };
  return *keys;
}

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>&
Presets() {
  static const auto* presets = new std::map<
      std::string, std::vector<std::pair<std::string, std::string>>>{
      {"fig1",
       {{"kind", "threshold"},
        {"pop", "lognormal:median=60000,sigma_log=1"},
        {"n", "500"},
        {"trials", "5000"},
        {"eps-grid", "0.01,0.1,1,4"},
        {"thresholds", "log:10000:1000000:41"}}},
      {"fig2",
       {{"kind", "threshold"},
        {"column", "salary"},
        {"n", "500"},
        {"trials", "5000"},
        {"eps-grid", "0.01,0.1,1,4"},
        {"thresholds", "log:10000:1000000:41"}}},
      {"table1",
       {{"kind", "threshold"},
        {"column", "salary"},
        {"n", "500"},
        {"trials", "5000"},
        {"eps-grid", "0.01,0.05,0.1,1,2,4"},
        {"thresholds", "log:20000:1000000:81"},
        {"optimal-only", "true"}}},
      {"fig3a",
       {{"kind", "kv"},
        {"mu-grid", "0:2:0.1"},
        {"n", "400"},
        {"sigma", "1"},
        {"c", "2"},
        {"eps", "1"},
        {"delta", "0.001"},
        {"trials", "20000"}}},
      {"fig3b",
       {{"kind", "histogram"},
        {"pop", "gaussian:mu=0.5,sigma=1"},
        {"dataset-size", "20000"},
        {"n", "400"},
        {"sigma", "1"},
        {"c", "0.5"},
        {"eps", "1"},
        {"delta", "0.001"},
        {"trials", "10000"},
        {"bins", "40"},
        {"hist-lo", "-0.5"},
        {"hist-hi", "1.5"},
        {"mechs", "fine,kv-fine"}}},
  };
  return *presets;
}

const std::map<std::string, std::string>& KeyHelp() {
  static const auto* help = new std::map<std::string, std::string>{
      {"preset", "fig1, fig2, table1, fig3a or fig3b"},
      {"seed", "Base seed (default $DP_TRILEMMA_SEED, then 0)"},
      {"threads", "Worker threads (0 = all cores)"},
      {"mech", "Mechanism id"},
      {"eps", "Privacy parameter epsilon"},
      {"delta", "Privacy parameter delta"},
      {"beta", "Clipping failure probability, or bias levels for bounds"},
      {"lambda", "Moment order"},
      {"psi", "Bound on the central lambda-th moment"},
      {"a", "Lower end of the prior interval for the mean"},
      {"b", "Upper end of the prior interval for the mean"},
      {"threshold", "Clipping threshold"},
      {"n0", "Minimum dataset size for the size-oblivious wrapper"},
      {"c", "Half-width of the fine-stage clipping window"},
      {"sigma", "Coarse-stage bin width"},
      {"n1", "Points used by the coarse stage"},
      {"input", "CSV file with the data"},
      {"column", "Column of --input to read"},
      {"pop", "Synthetic population, e.g. gaussian:mu=3,sigma=1"},
      {"n", "Sample size"},
      {"kind", "threshold, kv or histogram"},
      {"trials", "Monte Carlo trials per cell"},
      {"eps-grid", "Comma list of epsilons"},
      {"thresholds", "Comma list, lo:hi:step or log:lo:hi:count"},
      {"optimal-only", "Keep only the RMSE-optimal threshold per epsilon"},
      {"mu-grid", "Comma list, lo:hi:step or log:lo:hi:count"},
      {"mechs", "Comma list of fine and kv-fine"},
      {"dataset-size", "Records drawn from --pop to form the dataset"},
      {"bins", "Histogram bins"},
      {"hist-lo", "Histogram lower edge (default: population mean - 1)"},
      {"hist-hi", "Histogram upper edge (default: population mean + 1)"},
      {"bound", "Bound name"},
      {"n-grid", "Comma list of sample sizes"},
      {"delta-grid", "Comma list of deltas"},
      {"beta-grid", "Comma list of bias levels"},
      {"gamma-grid", "Comma list of gamma values (trilemma)"},
      {"tau", "Tail mass parameter (default: derived from delta and kappa)"},
      {"kappa", "Moment order used to derive tau"},
  };
  return *help;
}

const std::vector<std::string>& MechanismIds() {
  static const auto* ids = new std::vector<std::string>{
      "clipped-mean", "threshold", "name-and-shame", "combined",
      "coarse",       "kv-coarse", "fine",           "kv-fine",
      "smooth-sens",  "unknown-n-name-and-shame"};
  return *ids;
}

const std::vector<std::string>& BoundIds() {
  static const auto* ids = new std::vector<std::string>{
      "trilemma",  "trilemma-corollary", "trilemma-lambda2", "optimal-gamma",
      "tightness", "shuffled-epsilon",   "shuffling",        "ksu",
      "nonprivate-floor", "hodges-mse",  "tau"};
  return *ids;
}

// A failure with the exit code it maps to.
struct CliError {
  int code;
  std::string message;
};

CliError Usage(std::string message) { return {kExitUsage, std::move(message)}; }

CliError FromStatus(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnavailable:
      return {kExitIo, std::string(status.message())};
    default:
      return {kExitUsage, std::string(status.message())};
  }
}

template <typename T>
using CliOr = std::variant<T, CliError>;

// Every consulted setting, with defaults filled in, so that output headers
// record the full effective configuration.
class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> given)
      : given_(std::move(given)) {}

  bool Has(const std::string& key) const { return given_.count(key) > 0; }

  std::optional<std::string> Raw(const std::string& key) {
    auto it = given_.find(key);
    if (it == given_.end()) return std::nullopt;
    effective_[key] = it->second;
    return it->second;
  }

  std::string String(const std::string& key, const std::string& fallback) {
    std::optional<std::string> raw = Raw(key);
    if (raw.has_value()) return *raw;
    effective_[key] = fallback;
    return fallback;
  }

  absl::StatusOr<double> RequiredDouble(const std::string& key,
                                        const std::string& context) {
    std::optional<std::string> raw = Raw(key);
    if (!raw.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing required flag --", key, " for ", context));
    }
    return ParseDouble(key, *raw);
  }

  absl::StatusOr<double> Double(const std::string& key, double fallback) {
    std::optional<std::string> raw = Raw(key);
    if (!raw.has_value()) {
      // Use the recorded text, so replaying a header reproduces the run.
      const std::string text = FormatNumber(fallback);
      effective_[key] = text;
      return ParseDouble(key, text);
    }
    return ParseDouble(key, *raw);
  }

  absl::StatusOr<int64_t> Int(const std::string& key, int64_t fallback) {
    std::optional<std::string> raw = Raw(key);
    if (!raw.has_value()) {
      effective_[key] = absl::StrCat(fallback);
      return fallback;
    }
    int64_t value;
    if (!absl::SimpleAtoi(*raw, &value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("--", key, " expects an integer, got '", *raw, "'"));
    }
    return value;
  }

  absl::StatusOr<bool> Bool(const std::string& key, bool fallback) {
    std::optional<std::string> raw = Raw(key);
    if (!raw.has_value()) {
      effective_[key] = fallback ? "true" : "false";
      return fallback;
    }
    bool value;
    if (!absl::SimpleAtob(*raw, &value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("--", key, " expects true or false, got '", *raw, "'"));
    }
    return value;
  }

  // "a,b,c", "lo:hi:step" or "log:lo:hi:count".
  absl::StatusOr<std::vector<double>> Grid(const std::string& key,
                                           const std::string& fallback) {
    const std::string text = String(key, fallback);
    absl::StatusOr<std::vector<double>> grid = ParseGrid(text);
    if (!grid.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("--", key, ": ", grid.status().message()));
    }
    return grid;
  }

  void Record(const std::string& key, const std::string& value) {
    effective_[key] = value;
  }

  const std::map<std::string, std::string>& effective() const {
    return effective_;
  }

  static absl::StatusOr<std::vector<double>> ParseGrid(absl::string_view text) {
    std::vector<double> out;
    if (absl::StartsWith(text, "log:")) {
      std::vector<absl::string_view> parts =
          absl::StrSplit(text.substr(4), ':');
      double lo, hi;
      int64_t count;
      if (parts.size() != 3 || !absl::SimpleAtod(parts[0], &lo) ||
          !absl::SimpleAtod(parts[1], &hi) ||
          !absl::SimpleAtoi(parts[2], &count) || count < 1 || !(lo > 0) ||
          !(hi >= lo)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "'", text, "' is not log:lo:hi:count with 0 < lo <= hi"));
      }
      for (int64_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
      }
      return out;
    }
    if (absl::StrContains(text, ':')) {
      std::vector<absl::string_view> parts = absl::StrSplit(text, ':');
      double lo, hi, step;
      if (parts.size() != 3 || !absl::SimpleAtod(parts[0], &lo) ||
          !absl::SimpleAtod(parts[1], &hi) ||
          !absl::SimpleAtod(parts[2], &step) || !(step > 0) || !(hi >= lo)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "'", text, "' is not lo:hi:step with step > 0 and lo <= hi"));
      }
      const int64_t count =
          static_cast<int64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (int64_t i = 0; i < count; ++i) {
        // Multiplying instead of accumulating keeps grid points exact-ish.
        out.push_back(lo + static_cast<double>(i) * step);
      }
      return out;
    }
    for (absl::string_view item : absl::StrSplit(text, ',', absl::SkipEmpty())) {
      absl::StatusOr<double> v = ParseNumber(item);
      if (!v.ok()) return v.status();
      out.push_back(*v);
    }
    if (out.empty()) return absl::InvalidArgumentError("grid is empty");
    return out;
  }

 private:
  static absl::StatusOr<double> ParseDouble(const std::string& key,
                                            const std::string& raw) {
    absl::StatusOr<double> v = ParseNumber(raw);
    if (!v.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("--", key, " expects a number, got '", raw, "'"));
    }
    return v;
  }

  std::map<std::string, std::string> given_;
  std::map<std::string, std::string> effective_;
};

#define CLI_ASSIGN(lhs, expr)                              \
  auto lhs##_or = (expr);                                  \
  if (!lhs##_or.ok()) return FromStatus(lhs##_or.status()); \
  auto lhs = *std::move(lhs##_or)

absl::StatusOr<uint64_t> ResolveSeed(Settings& settings) {
  std::optional<std::string> raw = settings.Raw("seed");
  std::string source = "--seed";
  if (!raw.has_value()) {
    if (const char* env = std::getenv(kSeedEnv); env != nullptr) {
      raw = env;
      source = kSeedEnv;
    }
  }
  uint64_t seed = 0;
  if (raw.has_value() && !absl::SimpleAtoi(*raw, &seed)) {
    return absl::InvalidArgumentError(absl::StrCat(
        source, " expects a decimal 64-bit integer, got '", *raw, "'"));
  }
  settings.Record("seed", absl::StrCat(seed));
  return seed;
}

// Reads `key=value` lines. A file that starts with a provenance header is
// read through ParseProvenance, so any output file can serve as a config.
absl::StatusOr<std::map<std::string, std::string>> ReadConfigFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open config file '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (absl::StartsWith(text, "# dp_trilemma version=")) {
    absl::StatusOr<RunConfig> config = ParseProvenance(text);
    if (!config.ok()) return config.status();
    return config->settings;
  }
  std::map<std::string, std::string> values;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_number, ": expected key=value"));
    }
    absl::string_view key = absl::StripAsciiWhitespace(line.substr(0, eq));
    absl::ConsumePrefix(&key, "--");
    values[std::string(key)] = std::string(absl::StripAsciiWhitespace(line.substr(eq + 1)));
  }
  return values;
}

absl::Status WriteOutput(const std::string& path, const std::string& text,
                         std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return absl::OkStatus();
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    return absl::UnavailableError(
        absl::StrCat("cannot open output file '", path, "'"));
  }
  file << text;
  file.close();
  if (!file) {
    return absl::UnavailableError(
        absl::StrCat("failed writing output file '", path, "'"));
  }
  return absl::OkStatus();
}

RunConfig MakeRunConfig(const std::string& subcommand,
                        const Settings& settings) {
  RunConfig config;
  config.settings = settings.effective();
  config.settings["subcommand"] = subcommand;
  return config;
}

// Input data for `estimate`: a CSV column or a synthetic sample.
CliOr<std::vector<double>> LoadEstimateData(Settings& settings, uint64_t seed) {
  if (std::optional<std::string> input = settings.Raw("input")) {
    const std::string column = settings.String("column", "value");
    absl::StatusOr<std::vector<double>> data = LoadColumnCsv(*input, column);
    if (!data.ok()) return CliError{kExitIo, std::string(data.status().message())};
    return *std::move(data);
  }
  std::optional<std::string> pop_spec = settings.Raw("pop");
  if (!pop_spec.has_value()) {
    return Usage("estimate needs --input or --pop with --n");
  }
  absl::StatusOr<Population> pop = ParsePopulation(*pop_spec);
  if (!pop.ok()) return FromStatus(pop.status());
  absl::StatusOr<double> n = settings.RequiredDouble("n", "--pop");
  if (!n.ok()) return FromStatus(n.status());
  NoiseStream data_stream(seed, {0});
  absl::StatusOr<std::vector<double>> data =
      pop->Draw(static_cast<int64_t>(*n), data_stream);
  if (!data.ok()) return FromStatus(data.status());
  return *std::move(data);
}

CliOr<MeanMechanism> BuildMechanism(const std::string& id, Settings& settings,
                                    int64_t n) {
  const std::string context = absl::StrCat("--mech ", id);
  auto required = [&](const char* key) {
    return settings.RequiredDouble(key, context);
  };
  if (id == "clipped-mean") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(beta, required("beta"));
    CLI_ASSIGN(a, required("a"));
    CLI_ASSIGN(b, required("b"));
    CLI_ASSIGN(lambda, settings.Double("lambda", 2));
    CLI_ASSIGN(psi, settings.Double("psi", 1));
    CLI_ASSIGN(model, MomentModel::Create(a, b, lambda, psi));
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return ClippedMeanLaplace(d, model, eps, beta, s);
    });
  }
  if (id == "threshold") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(threshold, required("threshold"));
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return ThresholdClippedMean(d, threshold, eps, s);
    });
  }
  if (id == "name-and-shame") {
    CLI_ASSIGN(delta, required("delta"));
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return NameAndShameMean(d, delta, s);
    });
  }
  if (id == "combined") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(delta, required("delta"));
    CLI_ASSIGN(a, required("a"));
    CLI_ASSIGN(b, required("b"));
    CLI_ASSIGN(lambda, required("lambda"));
    CLI_ASSIGN(psi, required("psi"));
    CLI_ASSIGN(model, MomentModel::Create(a, b, lambda, psi));
    CLI_ASSIGN(budget, PrivacyBudget::Create(eps, delta));
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return CombinedUnbiasedMean(d, model, budget, s);
    });
  }
  if (id == "coarse" || id == "kv-coarse") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(delta, required("delta"));
    CLI_ASSIGN(params, CoarseParams::Create(eps, delta));
    const bool fixed = id == "kv-coarse";
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return fixed ? KvCoarseEstimate(d, params, s)
                   : CoarseEstimate(d, params, s);
    });
  }
  if (id == "fine" || id == "kv-fine") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(delta, required("delta"));
    absl::StatusOr<FineParams> defaults;
    if (settings.Has("lambda") || settings.Has("psi")) {
      CLI_ASSIGN(lambda, required("lambda"));
      CLI_ASSIGN(psi, required("psi"));
      defaults = DefaultFineParams(n, eps, delta, psi, lambda);
    } else {
      defaults = GaussianDefaults(n, eps, delta);
    }
    FineParams params;
    if (defaults.ok()) params = *defaults;
    const bool overridden = settings.Has("n1");
    if (!defaults.ok() && !overridden) return FromStatus(defaults.status());
    params.epsilon = eps;
    params.delta = delta;
    CLI_ASSIGN(n1, settings.Int("n1", params.n1));
    CLI_ASSIGN(sigma, settings.Double("sigma", overridden ? 1 : params.sigma));
    CLI_ASSIGN(c, settings.Double("c", overridden ? 1 : params.c));
    params.n1 = n1;
    params.n2 = n - n1;
    params.sigma = sigma;
    params.c = c;
    const CoarseBins bins =
        id == "fine" ? CoarseBins::kRandomOffset : CoarseBins::kFixed;
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return FineEstimate(d, params, s, bins);
    });
  }
  if (id == "smooth-sens") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(a, required("a"));
    CLI_ASSIGN(b, required("b"));
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      return SmoothSensitivityMean(d, eps, a, b, s);
    });
  }
  if (id == "unknown-n-name-and-shame") {
    CLI_ASSIGN(eps, required("eps"));
    CLI_ASSIGN(delta, required("delta"));
    CLI_ASSIGN(n0, settings.Int("n0", 1));
    return MeanMechanism([=](std::span<const double> d, NoiseSource& s) {
      const MeanMechanism inner = [delta](std::span<const double> x,
                                          NoiseSource& t) {
        return NameAndShameMean(x, delta, t);
      };
      return SizeObliviousWrap(inner, d, eps, delta, n0, s);
    });
  }
  return Usage(absl::StrCat("unknown mechanism '", id,
                            "'; valid ids: ", absl::StrJoin(MechanismIds(), ", ")));
}

CliOr<int> CmdEstimate(Settings& settings, std::string& text) {
  std::optional<std::string> mech = settings.Raw("mech");
  if (!mech.has_value()) {
    return Usage(absl::StrCat("missing required flag --mech; valid ids: ",
                              absl::StrJoin(MechanismIds(), ", ")));
  }
  CLI_ASSIGN(seed, ResolveSeed(settings));
  CliOr<std::vector<double>> data = LoadEstimateData(settings, seed);
  if (auto* e = std::get_if<CliError>(&data)) return *e;
  const std::vector<double>& values = std::get<std::vector<double>>(data);
  CliOr<MeanMechanism> mechanism =
      BuildMechanism(*mech, settings, static_cast<int64_t>(values.size()));
  if (auto* e = std::get_if<CliError>(&mechanism)) return *e;

  NoiseStream stream(seed, {1});
  absl::StatusOr<EstimateOutcome> outcome =
      std::get<MeanMechanism>(mechanism)(values, stream);
  if (!outcome.ok()) return FromStatus(outcome.status());

  const RunConfig config = MakeRunConfig("estimate", settings);
  text = RenderProvenance(config);
  absl::StrAppend(&text, "mechanism=", *mech, "\n", "n=", values.size(), "\n",
                  "estimate=",
                  outcome->failed() ? "bottom" : FormatNumber(*outcome->value),
                  "\n", "bottom=", outcome->failed() ? "true" : "false", "\n",
                  "budget_eps=", FormatNumber(outcome->budget.epsilon), "\n",
                  "budget_delta=", FormatNumber(outcome->budget.delta), "\n");
  return outcome->failed() ? kExitBottom : kExitOk;
}

// Population for sweeps: an input CSV column (empirical) or a --pop spec.
CliOr<Population> SweepPopulation(Settings& settings, uint64_t seed,
                                  bool synthesize_dataset) {
  if (std::optional<std::string> input = settings.Raw("input")) {
    const std::string column = settings.String("column", "value");
    absl::StatusOr<std::vector<double>> data = LoadColumnCsv(*input, column);
    if (!data.ok()) return CliError{kExitIo, std::string(data.status().message())};
    absl::StatusOr<Population> pop = Population::Empirical(*std::move(data));
    if (!pop.ok()) return FromStatus(pop.status());
    return *std::move(pop);
  }
  std::optional<std::string> spec = settings.Raw("pop");
  if (!spec.has_value()) {
    return Usage("this sweep needs --input (with --column) or --pop");
  }
  absl::StatusOr<Population> pop = ParsePopulation(*spec);
  if (!pop.ok()) return FromStatus(pop.status());
  if (!synthesize_dataset) return *std::move(pop);
  CLI_ASSIGN(size, settings.Int("dataset-size", 20000));
  NoiseStream stream(seed, {2});
  absl::StatusOr<std::vector<double>> records = pop->Draw(size, stream);
  if (!records.ok()) return FromStatus(records.status());
  absl::StatusOr<Population> dataset =
      Population::Empirical(*std::move(records));
  if (!dataset.ok()) return FromStatus(dataset.status());
  return *std::move(dataset);
}

CliOr<int> CmdSweep(Settings& settings, std::string& text) {
  settings.Raw("preset");
  const std::string kind = settings.String("kind", "threshold");
  CLI_ASSIGN(seed, ResolveSeed(settings));
  CLI_ASSIGN(threads, settings.Int("threads", 0));
  CLI_ASSIGN(trials, settings.Int("trials", 5000));

  if (kind == "threshold") {
    CliOr<Population> pop = SweepPopulation(settings, seed, false);
    if (auto* e = std::get_if<CliError>(&pop)) return *e;
    ThresholdSweepConfig config;
    CLI_ASSIGN(thresholds, settings.Grid("thresholds", "log:10000:1000000:41"));
    CLI_ASSIGN(eps_grid, settings.Grid("eps-grid", "1"));
    CLI_ASSIGN(n, settings.Int("n", 500));
    CLI_ASSIGN(optimal_only, settings.Bool("optimal-only", false));
    config.thresholds = thresholds;
    config.epsilons = eps_grid;
    config.n = n;
    config.trials = trials;
    config.seed = seed;
    config.threads = static_cast<int>(threads);
    absl::StatusOr<SweepReport> report =
        ThresholdSweep(std::get<Population>(pop), config);
    if (!report.ok()) return FromStatus(report.status());
    if (optimal_only) report->rows = OptimalThresholds(*report);
    text = RenderSweepCsv(*report, MakeRunConfig("sweep", settings));
    return kExitOk;
  }
  if (kind == "kv") {
    KvSweepConfig config;
    CLI_ASSIGN(mu_grid, settings.Grid("mu-grid", "0:2:0.1"));
    CLI_ASSIGN(n, settings.Int("n", 400));
    CLI_ASSIGN(n1, settings.Int("n1", n / 2));
    CLI_ASSIGN(sigma, settings.Double("sigma", 1));
    CLI_ASSIGN(c, settings.Double("c", 2));
    CLI_ASSIGN(eps, settings.Double("eps", 1));
    CLI_ASSIGN(delta, settings.Double("delta", 1e-3));
    if (n1 < 1 || n1 >= n) return Usage("--n1 must lie in [1, n)");
    config.mu_grid = mu_grid;
    config.n1 = n1;
    config.n2 = n - n1;
    config.sigma = sigma;
    config.c = c;
    config.epsilon = eps;
    config.delta = delta;
    config.trials = trials;
    config.seed = seed;
    config.threads = static_cast<int>(threads);
    absl::StatusOr<SweepReport> report = KvBiasSweep(config);
    if (!report.ok()) return FromStatus(report.status());
    text = RenderSweepCsv(*report, MakeRunConfig("sweep", settings));
    return kExitOk;
  }
  if (kind == "histogram") {
    CliOr<Population> dataset = SweepPopulation(settings, seed, true);
    if (auto* e = std::get_if<CliError>(&dataset)) return *e;
    const Population& pop = std::get<Population>(dataset);
    CLI_ASSIGN(n, settings.Int("n", 400));
    CLI_ASSIGN(n1, settings.Int("n1", n / 2));
    CLI_ASSIGN(sigma, settings.Double("sigma", 1));
    CLI_ASSIGN(c, settings.Double("c", 0.5));
    CLI_ASSIGN(eps, settings.Double("eps", 1));
    CLI_ASSIGN(delta, settings.Double("delta", 1e-3));
    CLI_ASSIGN(bins, settings.Int("bins", 40));
    CLI_ASSIGN(lo, settings.Double("hist-lo", pop.mean() - 1));
    CLI_ASSIGN(hi, settings.Double("hist-hi", pop.mean() + 1));
    const std::string mechs = settings.String("mechs", "fine,kv-fine");
    if (n1 < 1 || n1 >= n) return Usage("--n1 must lie in [1, n)");
    FineParams params{eps, delta, c, sigma, n1, n - n1};
    std::vector<NamedHistogram> histograms;
    for (absl::string_view id : absl::StrSplit(mechs, ',', absl::SkipEmpty())) {
      CoarseBins kind_of_bins;
      if (id == "fine") {
        kind_of_bins = CoarseBins::kRandomOffset;
      } else if (id == "kv-fine") {
        kind_of_bins = CoarseBins::kFixed;
      } else {
        return Usage(absl::StrCat("--mechs accepts fine and kv-fine, got '",
                                  id, "'"));
      }
      const MeanMechanism mechanism = [params, kind_of_bins](
                                          std::span<const double> d,
                                          NoiseSource& s) {
        return FineEstimate(d, params, s, kind_of_bins);
      };
      absl::StatusOr<Histogram> histogram =
          SamplingHistogram(pop, mechanism, n, trials, static_cast<int>(bins),
                            lo, hi, seed, static_cast<int>(threads));
      if (!histogram.ok()) return FromStatus(histogram.status());
      histograms.push_back({std::string(id), *std::move(histogram)});
    }
    text = RenderHistogramCsv(histograms, MakeRunConfig("sweep", settings));
    return kExitOk;
  }
  return Usage(absl::StrCat("unknown --kind '", kind,
                            "'; expected threshold, kv or histogram"));
}

CliOr<int> CmdBounds(Settings& settings, std::string& text) {
  std::optional<std::string> bound = settings.Raw("bound");
  if (!bound.has_value()) {
    return Usage(absl::StrCat("missing required flag --bound; valid names: ",
                              absl::StrJoin(BoundIds(), ", ")));
  }
  if (std::find(BoundIds().begin(), BoundIds().end(), *bound) ==
      BoundIds().end()) {
    return Usage(absl::StrCat("unknown bound '", *bound, "'; valid names: ",
                              absl::StrJoin(BoundIds(), ", ")));
  }
  CLI_ASSIGN(n_grid, settings.Grid("n-grid", "100"));
  CLI_ASSIGN(eps_grid, settings.Grid("eps-grid", "1"));
  CLI_ASSIGN(delta_grid, settings.Grid("delta-grid", "0"));
  CLI_ASSIGN(beta_grid, settings.Grid("beta-grid", "0.001"));
  CLI_ASSIGN(lambda, settings.Double("lambda", 2));
  CLI_ASSIGN(psi, settings.Double("psi", kInfinity));
  CLI_ASSIGN(kappa, settings.Double("kappa", 2));
  std::optional<double> fixed_tau;
  if (settings.Has("tau")) {
    CLI_ASSIGN(tau, settings.Double("tau", 0));
    fixed_tau = tau;
  }
  const std::string gamma_text = settings.String("gamma-grid", "optimal");
  std::vector<std::optional<double>> gammas;
  if (gamma_text == "optimal") {
    gammas.push_back(std::nullopt);
  } else {
    absl::StatusOr<std::vector<double>> grid = Settings::ParseGrid(gamma_text);
    if (!grid.ok()) {
      return Usage(absl::StrCat("--gamma-grid: ", grid.status().message()));
    }
    for (double g : *grid) gammas.push_back(g);
  }

  std::vector<BoundRow> rows;
  const std::string& name = *bound;
  for (double nd : n_grid) {
    const int64_t n = static_cast<int64_t>(std::llround(nd));
    for (double eps : eps_grid) {
      for (double delta : delta_grid) {
        for (double beta : beta_grid) {
          BoundRow row{n, eps, delta, beta, name, 0.0, true};
          absl::StatusOr<double> tau_or =
              fixed_tau.has_value() ? absl::StatusOr<double>(*fixed_tau)
                                    : TauFromMoment(delta, kappa);
          const double tau = tau_or.ok() ? *tau_or : kInfinity;
          if (name == "trilemma") {
            for (const std::optional<double>& g : gammas) {
              TrilemmaPoint p{n, eps, delta, beta, lambda, tau, 0.0};
              p.gamma = g.has_value() ? *g : OptimalGamma(beta, lambda, tau, eps);
              BoundRow r = row;
              if (g.has_value()) {
                r.bound_name = absl::StrCat("trilemma[gamma=",
                                            FormatNumber(*g), "]");
              }
              r.value = TrilemmaLowerBoundRaw(p);
              r.regime_ok = tau_or.ok() && TrilemmaRegimeOk(p);
              rows.push_back(r);
            }
            continue;
          }
          if (name == "optimal-gamma") {
            row.value = OptimalGamma(beta, lambda, tau, eps);
            row.regime_ok = tau_or.ok() && beta <= 1.0 / 80;
          } else if (name == "trilemma-corollary") {
            row.value = TrilemmaCorollaryRaw(n, eps, delta, beta, lambda);
            row.regime_ok = TrilemmaCorollary(n, eps, delta, beta, lambda).ok();
          } else if (name == "trilemma-lambda2") {
            row.value = TrilemmaLambda2Raw(n, eps, delta, beta);
            row.regime_ok = TrilemmaLambda2(n, eps, delta, beta).ok();
          } else if (name == "tightness") {
            row.value = TightnessUpperBound(n, eps, delta, beta, psi);
            row.regime_ok = n >= 1 && eps > 0 && delta > 0 && beta > 0;
          } else if (name == "shuffled-epsilon") {
            row.value = ShuffledEpsilonRaw(eps, n, delta);
            row.regime_ok = ShuffledEpsilon(eps, n, delta).ok();
          } else if (name == "shuffling") {
            row.value = ShufflingLowerBoundRaw(n, eps, beta);
            row.regime_ok = ShufflingRegimeOk(n, eps, delta, beta);
          } else if (name == "ksu") {
            row.value = KsuLowerBound(n, eps, delta);
            row.regime_ok = n >= 1 && eps + delta > 0;
          } else if (name == "nonprivate-floor") {
            row.value = NonprivateFloor(n);
            row.regime_ok = n >= 1;
          } else if (name == "hodges-mse") {
            row.value = HodgesMse(n);
            row.regime_ok = n >= 1;
          } else if (name == "tau") {
            row.value = tau;
            row.regime_ok = tau_or.ok();
          }
          rows.push_back(row);
        }
      }
    }
  }
  text = RenderBoundsCsv(rows, MakeRunConfig("bounds", settings));
  return kExitOk;
}

// Expands --config and --preset into ordinary flags. Precedence, highest
// first: command line, config file, preset.
CliOr<std::vector<std::string>> ExpandArguments(
    const std::vector<std::string>& args) {
  if (args.empty() || absl::StartsWith(args[0], "-")) return args;
  const std::string& subcommand = args[0];
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::vector<std::string> rest;
  for (size_t i = 1; i < args.size(); ++i) {
    absl::string_view arg = args[i];
    auto take_value = [&](absl::string_view flag,
                          std::optional<std::string>& slot) -> bool {
      if (arg == flag && i + 1 < args.size()) {
        slot = args[++i];
        return true;
      }
      if (absl::StartsWith(arg, absl::StrCat(flag, "="))) {
        slot = std::string(arg.substr(flag.size() + 1));
        return true;
      }
      return false;
    };
    if (take_value("--config", config_path)) continue;
    if (take_value("--preset", preset)) {
      rest.push_back(absl::StrCat("--preset=", *preset));
      continue;
    }
    rest.push_back(args[i]);
  }

  std::vector<std::string> expanded = {subcommand};
  std::map<std::string, std::string> from_config;
  if (config_path.has_value()) {
    absl::StatusOr<std::map<std::string, std::string>> values =
        ReadConfigFile(*config_path);
    if (!values.ok()) return FromStatus(values.status());
    from_config = *std::move(values);
    if (auto it = from_config.find("subcommand"); it != from_config.end()) {
      if (it->second != subcommand) {
        return Usage(absl::StrCat("config file is for '", it->second,
                                  "', not '", subcommand, "'"));
      }
      from_config.erase(it);
    }
    if (!preset.has_value()) {
      if (auto it = from_config.find("preset"); it != from_config.end()) {
        preset = it->second;
      }
    }
  }
  if (preset.has_value()) {
    auto it = Presets().find(*preset);
    if (it == Presets().end()) {
      std::vector<std::string> names;
      for (const auto& [name, values] : Presets()) names.push_back(name);
      return Usage(absl::StrCat("unknown preset '", *preset,
                                "'; valid presets: ", absl::StrJoin(names, ", ")));
    }
    if (subcommand != "sweep") {
      return Usage("presets apply to the sweep subcommand only");
    }
    for (const auto& [key, value] : it->second) {
      expanded.push_back(absl::StrCat("--", key, "=", value));
    }
  }
  for (const auto& [key, value] : from_config) {
    expanded.push_back(absl::StrCat("--", key, "=", value));
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CliOr<std::vector<std::string>> expanded = ExpandArguments(args);
  if (auto* e = std::get_if<CliError>(&expanded)) {
    err << "error: " << e->message << "\n";
    return e->code;
  }

  CLI::App app("Differentially private mean estimation toolkit",
               "dp_trilemma");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "key=value file; command-line flags take precedence");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> outputs;
  std::map<std::string, CLI::App*> subcommands;
  const std::map<std::string, std::string> descriptions = {
      {"estimate", "Run one mechanism on a dataset"},
      {"sweep", "Monte Carlo sweeps (threshold, kv, histogram)"},
      {"bounds", "Evaluate a closed-form bound over a grid"},
  };
  for (const auto& [name, keys] : SubcommandKeys()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--output", outputs[name], "Output path (default stdout)");
    for (const std::vector<std::string>* list : {&CommonKeys(), &keys}) {
      for (const std::string& key : *list) {
        const auto help = KeyHelp().find(key);
        sub->add_option(absl::StrCat("--", key), values[name][key],
                        help == KeyHelp().end() ? "" : help->second);
      }
    }
    subcommands[name] = sub;
  }

  std::vector<std::string> reversed(std::get<std::vector<std::string>>(expanded));
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& [name, sub] : subcommands) {
    if (!sub->parsed()) continue;
    std::map<std::string, std::string> given;
    for (const auto& [key, value] : values[name]) {
      if (sub->get_option(absl::StrCat("--", key))->count() > 0) {
        given[key] = value;
      }
    }
    Settings settings(std::move(given));
    std::string text;
    CliOr<int> result = name == "estimate" ? CmdEstimate(settings, text)
                        : name == "sweep"  ? CmdSweep(settings, text)
                                           : CmdBounds(settings, text);
    if (auto* e = std::get_if<CliError>(&result)) {
      err << "error: " << e->message << "\n";
      return e->code;
    }
    if (absl::Status s = WriteOutput(outputs[name], text, out); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitIo;
    }
    return std::get<int>(result);
  }
  err << "error: no subcommand\n";
  return kExitUsage;
}

}  // namespace dpmean
