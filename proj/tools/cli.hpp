// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. run_cli is the whole program minus process setup,
// so tests can drive it in-process.

#ifndef ALROBUST_TOOLS_CLI_HPP_
#define ALROBUST_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace alrobust::cli {

// First line of every CSV the tool writes.
inline constexpr const char* kCsvVersion = "alrobust-csv v1";

// Directory for output files when --output is not given. Unset means stdout.
inline constexpr const char* kOutputDirEnv = "ALROBUST_OUTPUT_DIR";

enum ExitCode : int {
  kExitOk = 0,
  kExitBoundFailed = 1,
  kExitInvalid = 2,
};

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace alrobust::cli

#endif  // ALROBUST_TOOLS_CLI_HPP_
