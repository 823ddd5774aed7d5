#pragma once

#include <stdexcept>
#include <string>

namespace dpstream {

// Error categories. The numeric values are part of the C ABI (see dpstream.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kSchemaMismatch = 2,
  kOutOfRange = 3,
  kBudgetExceeded = 4,
  kNumerical = 5,
  kIo = 6,
  kParse = 7,
  kFailedPrecondition = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dpstream
