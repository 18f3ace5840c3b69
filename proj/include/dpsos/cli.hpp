// Copyright 2026 The dpsos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// The dpsos command-line tool: gen, estimate, certify, audit, lemmas.
//
// Exit codes: 0 success (including reject outcomes, which are valid private
// outputs), 1 a check failed or a violation was flagged, 2 malformed input
// or usage, 3 numerical failure.

#ifndef DPSOS_CLI_HPP_
#define DPSOS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace dpsos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitNumerical = 3;

// Runs the tool with argv[0] being the program name. Output files are
// written to the paths given; everything else goes to `out` / `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace dpsos::cli

#endif  // DPSOS_CLI_HPP_
