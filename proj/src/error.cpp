// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/error.hpp"

namespace gentropy {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::UnsupportedClosedForm: return "UnsupportedClosedForm";
    case ErrorCode::UnsupportedMarginal: return "UnsupportedMarginal";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::InsufficientLags: return "InsufficientLags";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gentropy
