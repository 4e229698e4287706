// Copyright 2026 The Geostore Authors
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


#ifndef GEOSTORE_TOOLS_CLI_CLI_HPP_
#define GEOSTORE_TOOLS_CLI_CLI_HPP_

#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace geostore::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kServerError = 2,
  kConnectionFailure = 3,
};

using EnvLookup = std::function<const char*(const char*)>;

/// Runs one command. `args` includes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = std::getenv);

}  // namespace geostore::cli

#endif  // GEOSTORE_TOOLS_CLI_CLI_HPP_
