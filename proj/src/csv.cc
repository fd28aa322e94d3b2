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

#include "dpmean/csv.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "glog/logging.h"

namespace dpmean {
namespace {

constexpr absl::string_view kProvenancePrefix = "# dp_trilemma version=";

std::vector<absl::string_view> Lines(absl::string_view text) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  for (absl::string_view& line : lines) line = absl::StripSuffix(line, "\r");
  return lines;
}

}  // namespace

std::string RenderProvenance(const RunConfig& config) {
  std::string out = absl::StrCat(kProvenancePrefix, config.version, "\n");
  for (const auto& [key, value] : config.settings) {
    absl::StrAppend(&out, "# ", key, "=", value, "\n");
  }
  return out;
}

absl::StatusOr<RunConfig> ParseProvenance(absl::string_view text) {
  std::vector<absl::string_view> lines = Lines(text);
  if (lines.empty() || !absl::StartsWith(lines[0], kProvenancePrefix)) {
    return absl::InvalidArgumentError(
        "missing '# dp_trilemma version=' provenance line");
  }
  RunConfig config;
  config.version = std::string(lines[0].substr(kProvenancePrefix.size()));
  for (size_t i = 1; i < lines.size(); ++i) {
    absl::string_view line = lines[i];
    if (!absl::ConsumePrefix(&line, "# ")) break;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("provenance line ", i + 1, " is not key=value: ", line));
    }
    std::string key(line.substr(0, eq));
    config.settings[key] = std::string(line.substr(eq + 1));
  }
  return config;
}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.12g", value);
}

absl::StatusOr<double> ParseNumber(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value;
  if (!absl::SimpleAtod(text, &value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", text, "' is not a number"));
  }
  return value;
}

std::string RenderSweepCsv(const SweepReport& report, const RunConfig& config) {
  std::string out = RenderProvenance(config);
  absl::StrAppend(&out, kSweepColumns, "\n");
  for (const SweepRow& row : report.rows) {
    const TrialStats& s = row.stats;
    absl::StrAppend(&out, row.mechanism, ",", FormatNumber(row.epsilon), ",",
                    FormatNumber(row.delta), ",", FormatNumber(row.param), ",",
                    s.trials, ",", s.failures, ",", FormatNumber(s.bias), ",",
                    FormatNumber(s.bias_ci), ",", FormatNumber(s.se), ",",
                    FormatNumber(s.rmse), ",", FormatNumber(s.rmse_ci), "\n");
  }
  return out;
}

absl::StatusOr<SweepReport> ParseSweepCsv(absl::string_view text) {
  std::vector<absl::string_view> lines = Lines(text);
  size_t i = 0;
  while (i < lines.size() && absl::StartsWith(lines[i], "#")) ++i;
  if (i == lines.size() || lines[i] != kSweepColumns) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sweep CSV header must be '", kSweepColumns, "', got '",
        i < lines.size() ? lines[i] : "", "'"));
  }
  SweepReport report;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<absl::string_view> f = absl::StrSplit(lines[i], ',');
    if (f.size() != 11) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", i + 1, " has ", f.size(), " fields, expected 11"));
    }
    SweepRow row;
    row.mechanism = std::string(f[0]);
    double* numeric[] = {&row.epsilon,      &row.delta,      &row.param,
                         &row.stats.bias,   &row.stats.bias_ci,
                         &row.stats.se,     &row.stats.rmse,
                         &row.stats.rmse_ci};
    const int columns[] = {1, 2, 3, 6, 7, 8, 9, 10};
    for (int k = 0; k < 8; ++k) {
      absl::StatusOr<double> v = ParseNumber(f[columns[k]]);
      if (!v.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", i + 1, ": ", v.status().message()));
      }
      *numeric[k] = *v;
    }
    if (!absl::SimpleAtoi(f[4], &row.stats.trials) ||
        !absl::SimpleAtoi(f[5], &row.stats.failures)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", i + 1, ": trials and failures must be integers"));
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string RenderBoundsCsv(const std::vector<BoundRow>& rows,
                            const RunConfig& config) {
  std::string out = RenderProvenance(config);
  absl::StrAppend(&out, "#! values are exact up to unspecified constants\n");
  absl::StrAppend(&out, kBoundsColumns, "\n");
  for (const BoundRow& row : rows) {
    absl::StrAppend(&out, row.n, ",", FormatNumber(row.epsilon), ",",
                    FormatNumber(row.delta), ",", FormatNumber(row.beta), ",",
                    row.bound_name, ",", FormatNumber(row.value), ",",
                    row.regime_ok ? "true" : "false", "\n");
  }
  return out;
}

std::string RenderHistogramCsv(const std::vector<NamedHistogram>& histograms,
                               const RunConfig& config) {
  std::string out = RenderProvenance(config);
  const double mean =
      histograms.empty() ? 0.0 : histograms.front().histogram.dataset_mean;
  absl::StrAppend(&out, "#! dataset_mean=", FormatNumber(mean), "\n");
  absl::StrAppend(&out, kHistogramColumns, "\n");
  for (const NamedHistogram& named : histograms) {
    const Histogram& h = named.histogram;
    for (size_t b = 0; b < h.counts.size(); ++b) {
      absl::StrAppend(&out, named.mechanism, ",", FormatNumber(h.edges[b]), ",",
                      FormatNumber(h.edges[b + 1]), ",", h.counts[b], "\n");
    }
  }
  return out;
}

absl::StatusOr<std::vector<std::string>> SplitCsvRecord(absl::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

absl::StatusOr<std::vector<double>> LoadColumnCsv(const std::string& path,
                                                  absl::string_view column) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  std::string line;
  if (!std::getline(in, line)) {
    return absl::DataLossError(absl::StrCat("'", path, "' is empty"));
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // Tolerate a UTF-8 byte order mark.
  if (absl::StartsWith(line, "\xEF\xBB\xBF")) line.erase(0, 3);
  absl::StatusOr<std::vector<std::string>> header = SplitCsvRecord(line);
  if (!header.ok()) {
    return absl::DataLossError(absl::StrCat("'", path, "' row 1: ",
                                            header.status().message()));
  }
  for (std::string& name : *header) {
    name = std::string(absl::StripAsciiWhitespace(name));
  }
  const auto it = std::find(header->begin(), header->end(), column);
  if (it == header->end()) {
    return absl::NotFoundError(
        absl::StrCat("'", path, "' has no column '", column,
                     "'; available: ", absl::StrJoin(*header, ", ")));
  }
  const size_t index = static_cast<size_t>(it - header->begin());

  std::vector<double> values;
  int64_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    absl::StatusOr<std::vector<std::string>> fields = SplitCsvRecord(line);
    if (!fields.ok()) {
      return absl::DataLossError(absl::StrCat("'", path, "' row ", row, ": ",
                                              fields.status().message()));
    }
    if (fields->size() <= index) {
      return absl::DataLossError(absl::StrCat("'", path, "' row ", row,
                                              " has no field for column '",
                                              column, "'"));
    }
    // Currency formatting such as "$24,989" is accepted.
    std::string cell = absl::StrReplaceAll(
        absl::StripAsciiWhitespace((*fields)[index]), {{"$", ""}, {",", ""}});
    double value;
    if (!absl::SimpleAtod(cell, &value) || !std::isfinite(value)) {
      return absl::DataLossError(absl::StrCat("'", path, "' row ", row,
                                              ": cannot parse '",
                                              (*fields)[index], "' as a number"));
    }
    values.push_back(value);
  }
  if (values.empty()) {
    return absl::DataLossError(
        absl::StrCat("'", path, "' has no data rows for '", column, "'"));
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  LOG(INFO) << "loaded column '" << column << "' from " << path
            << ": count=" << values.size()
            << " mean=" << FormatNumber(sum / values.size())
            << " min=" << FormatNumber(*lo) << " max=" << FormatNumber(*hi);
  return values;
}

}  // namespace dpmean
