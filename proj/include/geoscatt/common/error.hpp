// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geoscatt {

enum class ErrorCode {
  kEmptyInput,
  kUnmatchedRingBond,
  kUnknownElement,
  kUnbalancedParenthesis,
  kInvalidSyntax,
  kEmptyAfterPreprocess,
  kDegenerateSplit,
  kNotSymmetric,
  kNoConvergence,
  kInvalidScaleParams,
  kDimensionMismatch,
  kShapeMismatch,
  kSizeTooSmall,
  kDegenerateLabels,
  kZeroVariance,
  kIoError,
  kFormatError,
  kConfigError,
};

/// Stable, machine-readable name of an error category ("UnmatchedRingBond").
std::string_view error_code_name(ErrorCode code) noexcept;

/// Every module reports failures with this exception type. Parsers attach
/// the offending character offset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace geoscatt
