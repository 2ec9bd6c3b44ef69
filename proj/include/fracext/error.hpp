#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracext {

enum class ErrorKind {
  InvalidArgument,
  OrderTooLarge,
  ToleranceNotMet,
  MissingDerivative,
  NonConvergent,
  GridTooNarrow,
  FarBoundaryTooClose,
  SingularMatrix,
  WindowOutsideJ,
  ResidualTooLarge,
  NegativeValues,
  ConfigInvalid,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable category alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace fracext
