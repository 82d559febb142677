#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqkf {

enum class ErrorCode {
  NonFinite,
  ShapeMismatch,
  ChannelCountMismatch,
  LengthMismatch,
  EmptySeries,
  EmptySpectrum,
  EmptyObservations,
  NonPositiveVariance,
  CutoffOutOfRange,
  GammaOutOfRange,
  InvalidConfig,
  InvalidSkeleton,
  TooShort,
  NoConstraints,
  LengthCountMismatch,
  EmptySampleSet,
  NeedTwoSamples,
  EmptyGtSet,
  MisalignedPairs,
  DegenerateChannel,
  Parse,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this exception; `code()` lets
// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace freqkf
