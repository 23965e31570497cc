#pragma once

#include <stdexcept>
#include <string>

namespace sw {

enum class ErrorCode {
  Domain,       // argument outside the mathematical domain of the operation
  Parse,        // malformed text input
  Regime,       // certificate requested outside its construction's regime
  Unsupported,  // operation not defined for the given geometry
  Budget,       // zero or insufficient sample budget
  Degenerate,   // zero norms and similar degenerate inputs
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sw
