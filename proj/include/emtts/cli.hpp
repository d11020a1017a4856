// Copyright (c) 2026 The emtts Authors
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

#ifndef EMTTS_CLI_HPP_
#define EMTTS_CLI_HPP_

namespace emtts {

// Subcommand dispatcher behind the emtts binary. Returns the process exit
// status: 0 success, 2 usage errors, 1 anything else (with a structured
// "error: ..." line on stderr).
int dispatch(int argc, const char* const* argv);

}  // namespace emtts

#endif  // EMTTS_CLI_HPP_
