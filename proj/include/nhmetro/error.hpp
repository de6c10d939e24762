#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhmetro {

enum class ErrorKind {
  InvalidArgument,
  NonFinite,
  NotHermitian,
  NotPositive,
  Singular,
  OutOfRange,
  UnsupportedFamily,
  UnsupportedProbe,
  NotProjector,
  NotNormalized,
  ZeroScalar,
  Degenerate,
  ZeroG,
  NoRoot,
  NotBracketed,
  AllTrialsFailed,
  NoPositiveSolution,
  ZetaNotPositive,
  Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure in the library is reported through this type. The kind is
/// stable and is what callers (CLI, Python bindings) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhmetro
