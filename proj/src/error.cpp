#include "fracext/error.hpp"

namespace fracext {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OrderTooLarge: return "OrderTooLarge";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::MissingDerivative: return "MissingDerivative";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::GridTooNarrow: return "GridTooNarrow";
    case ErrorKind::FarBoundaryTooClose: return "FarBoundaryTooClose";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::WindowOutsideJ: return "WindowOutsideJ";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::NegativeValues: return "NegativeValues";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace fracext
