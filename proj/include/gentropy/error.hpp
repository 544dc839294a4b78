// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gentropy {

enum class ErrorCode {
  NotPositiveDefinite,
  DimensionMismatch,
  GridTooCoarse,
  NonFiniteValue,
  UnsupportedClosedForm,
  UnsupportedMarginal,
  Unsupported,
  NotConverged,
  SingularD,
  InsufficientLags,
  InsufficientData,
  InvalidSchedule,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace gentropy
