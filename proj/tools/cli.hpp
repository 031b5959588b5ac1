// Copyright 2026 The gsb Authors
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
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gsb/error.hpp"

namespace gsb::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;     // unparsable flags, model files or settings
inline constexpr int kExitNumeric = 3;    // solver or truncation failure
inline constexpr int kExitInvariant = 4;  // a checked identity or bound does not hold

/// Exit status for a library failure of the given kind.
int exit_code(ErrorKind kind);

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count: hardware concurrency capped by GSB_THREADS when set.
unsigned worker_threads();

}  // namespace gsb::cli
