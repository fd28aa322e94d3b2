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

#ifndef DPMEAN_CSV_H_
#define DPMEAN_CSV_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpmean/bench.h"

namespace dpmean {

inline constexpr char kVersion[] = "0.1.0";

// Every setting that produced an output file. Rendered as "# key=value"
// comment lines at the top of each CSV and recovered by ParseProvenance.
struct RunConfig {
  std::string version = kVersion;
  std::map<std::string, std::string> settings;

  bool operator==(const RunConfig& other) const = default;
};

// Header block: "# dp_trilemma version=<v>" followed by one sorted
// "# key=value" line per setting.
std::string RenderProvenance(const RunConfig& config);
// Reads the leading comment block of a CSV produced by this library.
absl::StatusOr<RunConfig> ParseProvenance(absl::string_view text);

// "%.12g"; nan and inf render as nan, inf, -inf.
std::string FormatNumber(double value);
absl::StatusOr<double> ParseNumber(absl::string_view text);

inline constexpr char kSweepColumns[] =
    "mechanism,eps,delta,param,trials,failures,bias,bias_ci,se,rmse,rmse_ci";
inline constexpr char kBoundsColumns[] =
    "n,eps,delta,beta,bound_name,value,regime_ok";
inline constexpr char kHistogramColumns[] = "mechanism,bin_lo,bin_hi,count";

std::string RenderSweepCsv(const SweepReport& report, const RunConfig& config);
// Parses a sweep CSV and rejects files whose column header differs from
// kSweepColumns.
absl::StatusOr<SweepReport> ParseSweepCsv(absl::string_view text);

struct BoundRow {
  int64_t n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  std::string bound_name;
  double value = 0.0;
  bool regime_ok = true;
};

std::string RenderBoundsCsv(const std::vector<BoundRow>& rows,
                            const RunConfig& config);

struct NamedHistogram {
  std::string mechanism;
  Histogram histogram;
};

// Adds a "#! dataset_mean=<value>" line after the provenance block.
std::string RenderHistogramCsv(const std::vector<NamedHistogram>& histograms,
                               const RunConfig& config);

// Splits one CSV record. Double-quoted fields may contain commas and "".
absl::StatusOr<std::vector<std::string>> SplitCsvRecord(absl::string_view line);

// Loads one numeric column from a headered UTF-8 CSV. Errors name the
// missing file, the available headers, or the offending row number.
absl::StatusOr<std::vector<double>> LoadColumnCsv(const std::string& path,
                                                  absl::string_view column);

}  // namespace dpmean

#endif  // DPMEAN_CSV_H_
