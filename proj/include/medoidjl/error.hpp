#pragma once

#include <stdexcept>
#include <string>

namespace medoidjl {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kEmptyInput,
  kDuplicatePoint,
  kBudgetExceeded,
  kUnsupported,
  kNotSymmetric,
  kParse,
  kIo,
  kMissingLevels,
};

const char* to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace medoidjl
