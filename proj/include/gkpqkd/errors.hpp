// Copyright 2026 The gkpqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPQKD_ERRORS_HPP_
#define GKPQKD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gkpqkd {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A covariance matrix violates the uncertainty principle beyond tolerance.
class UnphysicalState : public Error {
 public:
  using Error::Error;
};

// An iterative or truncated computation failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be inverted is singular.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

namespace internal {

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace internal
}  // namespace gkpqkd

#endif  // GKPQKD_ERRORS_HPP_
