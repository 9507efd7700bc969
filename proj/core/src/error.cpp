#include "radarnet/error.hpp"

namespace radarnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NyquistViolation: return "NyquistViolation";
    case ErrorCode::EmptyScatterers: return "EmptyScatterers";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::TooFewRamps: return "TooFewRamps";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::PadOverflow: return "PadOverflow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InsufficientClass: return "InsufficientClass";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::StaleCache: return "StaleCache";
    case ErrorCode::LayerMismatch: return "LayerMismatch";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace radarnet
