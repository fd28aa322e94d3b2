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

#ifndef DPMEAN_CLI_H_
#define DPMEAN_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace dpmean {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitBottom = 2,
  kExitIo = 3,
};

// Runs the dp_trilemma command line. `args` excludes the program name.
// Results go to `out` (or the --output file); diagnostics go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dpmean

#endif  // DPMEAN_CLI_H_
