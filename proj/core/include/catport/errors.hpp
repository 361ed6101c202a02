#pragma once

#include <stdexcept>
#include <string>

namespace catport {

enum class ErrorKind {
  InvalidConfig,
  CutoffTooSmall,
  UnsupportedRepresentation,
  ZeroNormState,
  ImpossibleOutcome,
  XCorrectionFailed,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace catport
