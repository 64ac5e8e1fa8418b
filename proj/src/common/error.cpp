// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/common/error.hpp"

namespace geoscatt {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::kEmptyInput:
    return "EmptyInput";
  case ErrorCode::kUnmatchedRingBond:
    return "UnmatchedRingBond";
  case ErrorCode::kUnknownElement:
    return "UnknownElement";
  case ErrorCode::kUnbalancedParenthesis:
    return "UnbalancedParenthesis";
  case ErrorCode::kInvalidSyntax:
    return "InvalidSyntax";
  case ErrorCode::kEmptyAfterPreprocess:
    return "EmptyAfterPreprocess";
  case ErrorCode::kDegenerateSplit:
    return "DegenerateSplit";
  case ErrorCode::kNotSymmetric:
    return "NotSymmetric";
  case ErrorCode::kNoConvergence:
    return "NoConvergence";
  case ErrorCode::kInvalidScaleParams:
    return "InvalidScaleParams";
  case ErrorCode::kDimensionMismatch:
    return "DimensionMismatch";
  case ErrorCode::kShapeMismatch:
    return "ShapeMismatch";
  case ErrorCode::kSizeTooSmall:
    return "SizeTooSmall";
  case ErrorCode::kDegenerateLabels:
    return "DegenerateLabels";
  case ErrorCode::kZeroVariance:
    return "ZeroVariance";
  case ErrorCode::kIoError:
    return "IoError";
  case ErrorCode::kFormatError:
    return "FormatError";
  case ErrorCode::kConfigError:
    return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string &message,
                     std::optional<std::size_t> position) {
  std::string out(error_code_name(code));
  out += ": ";
  out += message;
  if (position) {
    out += " (at position " + std::to_string(*position) + ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string &message,
             std::optional<std::size_t> position)
    : std::runtime_error(decorate(code, message, position)), code_(code),
      position_(position) { }

}  // namespace geoscatt
