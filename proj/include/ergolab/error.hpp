#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergolab {

enum class ErrorKind {
  kValidation,
  kAlphabetMismatch,
  kWindowOverrun,
  kCapExceeded,
  kBudgetExceeded,
  kIllegalInput,
  kInfeasibleTargets,
  kLegalityViolation,
  kSingularMatrix,
  kInsufficientDepth,
  kNonPeriodic,
  kInvalidParams,
  kOutOfRange,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ergolab
