#include "catport/errors.hpp"

namespace catport {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
      return "invalid-config";
    case ErrorKind::CutoffTooSmall:
      return "cutoff-too-small";
    case ErrorKind::UnsupportedRepresentation:
      return "unsupported-representation";
    case ErrorKind::ZeroNormState:
      return "zero-norm-state";
    case ErrorKind::ImpossibleOutcome:
      return "impossible-outcome";
    case ErrorKind::XCorrectionFailed:
      return "x-correction-failed";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + ": " + message);
}

}  // namespace catport
