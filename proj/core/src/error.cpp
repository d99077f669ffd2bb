#include "thermoform/error.hpp"

namespace thermoform {

ErrorFamily family_of(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::CycleBudgetExceeded:
    case ErrorKind::BudgetExceeded:
      return ErrorFamily::Budget;
    case ErrorKind::PerronFailure:
    case ErrorKind::NoConvergence:
      return ErrorFamily::Numerical;
    default:
      return ErrorFamily::Input;
  }
}

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ReducibleAdjacency: return "ReducibleAdjacency";
    case ErrorKind::BadDimensions: return "BadDimensions";
    case ErrorKind::NonBinaryAdjacency: return "NonBinaryAdjacency";
    case ErrorKind::NonFinitePotential: return "NonFinitePotential";
    case ErrorKind::ZeroEntropy: return "ZeroEntropy";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InadmissibleEnergy: return "InadmissibleEnergy";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorKind::DimensionNotOne: return "DimensionNotOne";
    case ErrorKind::BelowCritical: return "BelowCritical";
    case ErrorKind::NotFreezingShape: return "NotFreezingShape";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::CycleBudgetExceeded: return "CycleBudgetExceeded";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::PerronFailure: return "PerronFailure";
    case ErrorKind::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace thermoform
