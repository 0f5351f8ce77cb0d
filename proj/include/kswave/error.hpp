#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kswave {

enum class ErrorCode {
  NonPositiveRate,
  NegativeDiffusion,
  ChiOutOfRange,
  InvalidChiTable,
  NoUnstableEigenvalue,
  MultipleUnstableEigenvalues,
  InteriorStepFailed,
  NegativeDiscriminant,
  ZeroDiffusion,
  PointOutsideRegion,
  PreconditionViolated,
  StepLimitExceeded,
  NonFiniteState,
  BracketInvalid,
  NotConverged,
  NormalizationFailed,
  DimensionMismatch,
  InvalidFace,
  NoCrossing,
  InsufficientSamples,
  GridTooCoarse,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; every failure in the library
/// surfaces through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kswave
