#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qtomo {

enum class ErrorCode {
  // configuration
  InvalidP,
  TooFewDirections,
  ExtrapolationRefused,
  InvalidConfig,
  // data
  EmptySample,
  NonFiniteValue,
  EmptyFile,
  MissingColumn,
  NonNumericCell,
  DegenerateCovariate,
  IoFailure,
  // numeric degeneracy
  UnboundedRegion,
  EmptyRegion,
  DegenerateRegion,
  NoEnvelope,
  TooFewExceedances,
  DegenerateTail,
  OutOfRegime,
  SingularCovariance,
};

enum class ErrorCategory { Config, Data, Numeric };

std::string_view code_name(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// Every failure in the library surfaces as this exception; `code()` is the
/// machine-readable part and `what()` carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qtomo
