#pragma once

#include <stdexcept>
#include <string>

namespace deltagreen {

enum class ErrorCode {
  InvalidArgument,
  ContinuumEvaluation,   // real E >= 0 on the free line without an eta shift
  PoleWindow,            // E inside the exclusion window of a base pole
  TailEstimate,          // oscillator tail estimate could not be formed
  SingularMatrix,
  DegenerateD,
  EmptyRange,
  NearEigenvalue,
  ImpurityOutsideDomain,
};

const char* to_string(ErrorCode code) noexcept;

// Numeric failures (everything except InvalidArgument) map to exit status 3 in the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool is_numeric() const noexcept { return code_ != ErrorCode::InvalidArgument; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace deltagreen
