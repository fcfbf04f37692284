// Copyright 2026 The Eventlens Authors
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

#ifndef EVENTLENS_CLI_H_
#define EVENTLENS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace eventlens {

// Runs the command line. args excludes the program name. Returns 0 on
// success, 1 on an operational error (error JSON on `err`) and 2 on a usage
// error (help text on `err`).
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int RunCli(int argc, char** argv);

}  // namespace eventlens

#endif  // EVENTLENS_CLI_H_
