// Copyright 2026 The WhatIf Authors.
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

#ifndef WHATIF_TOOLS_CLI_H_
#define WHATIF_TOOLS_CLI_H_

#include <iosfwd>

namespace whatif {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitBackendError = 2;

// Entry point of the whatif command-line tool. Reports go to `out` (or the
// --out file), diagnostics to `err`.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace whatif

#endif  // WHATIF_TOOLS_CLI_H_
