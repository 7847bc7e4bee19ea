// Copyright 2026 The dccat Authors
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

#include <stdexcept>
#include <string>

namespace dccat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. `field` names the offending input.
struct ConfigError : Error {
  std::string field;
  ConfigError(std::string f, const std::string& what)
      : Error(f + ": " + what), field(std::move(f)) {}
};

/// Divergence, NaN or solver failure. `time` is the simulation time in seconds.
struct NumericalError : Error {
  double time;
  NumericalError(const std::string& what, double t)
      : Error(what + " at t = " + std::to_string(t) + " s"), time(t) {}
};

}  // namespace dccat
