#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diagbez {

enum class ErrorCode {
  InvalidArgument,
  Capacity,
  InadmissiblePair,
  CornerMismatch,
  RingMismatch,
  ModeDegree,
  Inconsistent,
  SingularSystem,
  UnknownSlot,
  Parse,
  Shape,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::InadmissiblePair: return "inadmissible";
    case ErrorCode::CornerMismatch: return "corner_mismatch";
    case ErrorCode::RingMismatch: return "ring_mismatch";
    case ErrorCode::ModeDegree: return "mode_degree";
    case ErrorCode::Inconsistent: return "inconsistent";
    case ErrorCode::SingularSystem: return "singular";
    case ErrorCode::UnknownSlot: return "unknown_slot";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Shape: return "shape";
  }
  return "unknown";
}

/// Library-wide exception; `code()` lets front ends map failures to exit
/// codes and structured HTTP errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace diagbez
