// Copyright 2026 The cimbench Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace cimbench {

// Error hierarchy. The CLI maps each family onto a process exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input, bad parameters, violated preconditions.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A solver or simulator could not produce a result.
class SolverError : public Error {
  public:
    using Error::Error;
};

/// Non-finite OPO amplitude during a CIM run.
class DivergenceError : public SolverError {
  public:
    DivergenceError(long round_trip, const std::string& detail)
        : SolverError("amplitude diverged at round trip " + std::to_string(round_trip) + ": " + detail),
          round_trip_(round_trip) {}
    long round_trip() const noexcept { return round_trip_; }

  private:
    long round_trip_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace cimbench
