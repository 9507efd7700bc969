#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radarnet {

enum class ErrorCode {
  InvalidArgument,
  DomainError,
  NyquistViolation,
  EmptyScatterers,
  UnknownClass,
  TooFewRamps,
  WindowTooLong,
  PadOverflow,
  ShapeMismatch,
  EmptyInput,
  BadMagic,
  Truncated,
  DimensionOverflow,
  Io,
  InsufficientClass,
  MissingClass,
  NonFiniteGradient,
  NonFiniteLoss,
  StaleCache,
  LayerMismatch,
  Config,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace radarnet
