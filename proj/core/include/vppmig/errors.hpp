// Copyright 2026 The vppmig Authors
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

#ifndef VPPMIG_ERRORS_HPP
#define VPPMIG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vppmig {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parameters admit no feasible schedule. `slot` names the first offending
/// time slot when the infeasibility can be localized.
class InfeasibleParameters : public Error {
 public:
  InfeasibleParameters(const std::string& what, std::size_t vpp, std::ptrdiff_t slot)
      : Error(what), vpp_(vpp), slot_(slot) {}

  std::size_t vpp() const noexcept { return vpp_; }
  std::ptrdiff_t slot() const noexcept { return slot_; }

 private:
  std::size_t vpp_;
  std::ptrdiff_t slot_;
};

/// The conic solver returned a non-optimal status where an optimum was needed.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Scenario or artifact file does not match the schema. `path` is a JSON
/// pointer-like location such as `/vpps/2/fleet/pue`.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vppmig

#endif  // VPPMIG_ERRORS_HPP
