// Copyright 2026 The flyby-dp Authors
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

namespace flyby {

// Exception hierarchy. The C API and the CLI map each class onto a status code:
// InputError -> 3, NoSolutionError -> 2, everything else -> 4.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed files, invalid parameters, unknown bodies.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A row-level parse failure; `line()` is 1-based.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line)
      : InputError(what + ", line " + std::to_string(line)), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The search space contains no feasible path.
class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, int stage) : Error(what), stage_(stage) {}
  /// First stage (event index) without any reachable state.
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

/// Iterative solver failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Orbit type not handled by the requested routine.
class UnsupportedOrbitError : public InputError {
 public:
  using InputError::InputError;
};

/// Broken internal invariant (back-pointer chain, monotonicity, accumulator mismatch).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace flyby
