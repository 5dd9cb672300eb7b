// Copyright 2026 The omas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OMAS_ERROR_HPP
#define OMAS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace omas {

/// Misuse of a library primitive (unknown node, empty set, bad argument).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A run or scenario breaks one of the standing assumptions under which the
/// tracking guarantees hold: dwell time between changes, bounded input slope,
/// decay above slope, diameter bound, or connectivity.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace omas

#endif  // OMAS_ERROR_HPP
