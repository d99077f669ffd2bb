#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermoform {

// Every failure raised by the library carries one of these kinds. The kinds
// are grouped into three families which the command-line tool maps to exit
// codes (input = 2, budget = 3, numerical = 4).
enum class ErrorKind {
  // input
  ReducibleAdjacency,
  BadDimensions,
  NonBinaryAdjacency,
  NonFinitePotential,
  ZeroEntropy,
  InvalidInput,
  InadmissibleEnergy,
  EmptyInterior,
  DimensionTooHigh,
  DimensionNotOne,
  BelowCritical,
  NotFreezingShape,
  GridTooCoarse,
  // budget
  CycleBudgetExceeded,
  BudgetExceeded,
  // numerical
  PerronFailure,
  NoConvergence,
};

enum class ErrorFamily { Input, Budget, Numerical };

ErrorFamily family_of(ErrorKind kind) noexcept;
std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorFamily family() const noexcept { return family_of(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace thermoform
