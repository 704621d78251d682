#pragma once

#include <stdexcept>
#include <string>

namespace xray {

/// Failure categories. The numeric values are mirrored by the C API status codes.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Io = 2,
  Format = 3,
  NoOverlap = 4,
  Internal = 5,
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

/// Rethrows `e` with `context` prepended to its message, keeping the code.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  throw Error(e.code(), context + ": " + e.what());
}

const char* error_code_name(ErrorCode code) noexcept;

}  // namespace xray
