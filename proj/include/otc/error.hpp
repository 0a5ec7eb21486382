#pragma once

#include <stdexcept>
#include <string>

namespace otc {

enum class ErrorCode {
  MassOverflow,
  NonPositiveRate,
  SplitNotUnit,
  SupplyOutOfRange,
  InvalidArgument,
  DimensionMismatch,
  InvalidInitialState,
  StepTooLarge,
  ToleranceUnreachable,
  NoConvergence,
  EpsOutOfRange,
  NotCertified,
  LostTrack,
  InfeasibleInitial,
  GridMismatch,
  ConfigParse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace otc
