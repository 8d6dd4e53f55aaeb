// Copyright 2026 The bayerpipe Authors. All Rights Reserved.
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


#ifndef BAYERPIPE_TOOLS_CLI_HPP_
#define BAYERPIPE_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace bayerpipe::cli {

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitParse = 2,     // malformed image, CFA or manifest file
  kExitIo = 3,        // missing or unwritable file
  kExitInvalid = 4,   // bad parameter, dimension or value domain
  kExitMismatch = 5,  // replay did not reproduce the manifest
  kExitUsage = 64,    // unknown flag, missing argument
};

// Runs one command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace bayerpipe::cli

#endif  // BAYERPIPE_TOOLS_CLI_HPP_
