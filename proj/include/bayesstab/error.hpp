// Copyright 2026 The bayesstab Authors
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

#ifndef BAYESSTAB_ERROR_HPP_
#define BAYESSTAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bayesstab {

enum class ErrorCode {
  kInvalidInput,
  kConfiguration,
  kUnsupported,
  kProtocol,
  kInstanceTooLarge,
  kZeroEvidence,
  kValidity,
  kInfeasible,
  kOutOfTheorem,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return "invalid-input";
    case ErrorCode::kConfiguration:
      return "configuration";
    case ErrorCode::kUnsupported:
      return "unsupported";
    case ErrorCode::kProtocol:
      return "protocol";
    case ErrorCode::kInstanceTooLarge:
      return "instance-too-large";
    case ErrorCode::kZeroEvidence:
      return "zero-evidence";
    case ErrorCode::kValidity:
      return "validity";
    case ErrorCode::kInfeasible:
      return "infeasible";
    case ErrorCode::kOutOfTheorem:
      return "out-of-theorem";
  }
  return "unknown";
}

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a free parameter lies outside the interval where a bound holds.
// The admissible interval travels with the error.
class ValidityError : public Error {
 public:
  ValidityError(const std::string& message, double lo, double hi)
      : Error(ErrorCode::kValidity, message + " (admissible window [" +
                                        std::to_string(lo) + ", " +
                                        std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

namespace internal {

inline void Require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace internal
}  // namespace bayesstab

#endif  // BAYESSTAB_ERROR_HPP_
