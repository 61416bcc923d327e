#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skyear {

enum class ErrorCode {
  InsufficientMics,
  NonPositiveRadius,
  SilentInput,
  UnknownKind,
  SourceTooClose,
  InjectionOutOfRange,
  ChannelMismatch,
  WindowTooLong,
  WindowNotBuffered,
  LengthMismatch,
  IndivisibleDims,
  RatioOutOfRange,
  ShapeMismatch,
  EmptyTrainingSet,
  DivergedLoss,
  DegenerateInput,
  RankDeficient,
  DegenerateGeometry,
  TooFewObservations,
  ConfigError,
  IoError,
  FormatError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and tests) can branch on the kind of failure without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace skyear
