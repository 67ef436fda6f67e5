#pragma once

#include <stdexcept>
#include <string>

namespace urbanbench {

// Error categories. The CLI maps each one to a distinct process exit code.
enum class ErrorCode {
  kInvalidArgument = 2,
  kMissingFile = 3,
  kSchema = 4,
  kMargin = 5,
  kDegenerate = 6,
  kConfig = 7,
  kConflict = 8,
};

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

inline void require(bool cond, const std::string& what,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!cond) throw Error(code, what);
}

}  // namespace urbanbench
