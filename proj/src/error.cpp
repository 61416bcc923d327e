#include "skyear/error.hpp"

namespace skyear {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientMics: return "InsufficientMics";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::SilentInput: return "SilentInput";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::SourceTooClose: return "SourceTooClose";
    case ErrorCode::InjectionOutOfRange: return "InjectionOutOfRange";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::WindowNotBuffered: return "WindowNotBuffered";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndivisibleDims: return "IndivisibleDims";
    case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace skyear
