#pragma once

#include <stdexcept>
#include <string>

namespace fxcast {

enum class ErrorCode {
  InvalidArgument,
  InsufficientData,
  Shape,
  Format,
  Ordering,
  Parse,
  Validation,
  InvalidState,
  Divergence,
  DegenerateVariance,
  Numeric,
  Io,
};

class FxError : public std::runtime_error {
 public:
  FxError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw FxError(code, msg);
}

}  // namespace fxcast
