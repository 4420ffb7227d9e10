#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmctree {

enum class ErrorCode {
  NotPSD,
  DimensionMismatch,
  BadPhase,
  NotProjection,
  SizeOverflow,
  UnknownLabel,
  InvalidVertex,
  InvalidSpec,
  ZeroWeightState,
  BadState,
  DegenerateProjection,
  ZeroProjection,
  Schema,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can map it onto a structured JSON error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qmctree
