#include "qtomo/error.hpp"

namespace qtomo {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::TooFewDirections: return "TooFewDirections";
    case ErrorCode::ExtrapolationRefused: return "ExtrapolationRefused";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::DegenerateCovariate: return "DegenerateCovariate";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DegenerateRegion: return "DegenerateRegion";
    case ErrorCode::NoEnvelope: return "NoEnvelope";
    case ErrorCode::TooFewExceedances: return "TooFewExceedances";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidP:
    case ErrorCode::TooFewDirections:
    case ErrorCode::ExtrapolationRefused:
    case ErrorCode::InvalidConfig:
      return ErrorCategory::Config;
    case ErrorCode::EmptySample:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::EmptyFile:
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumericCell:
    case ErrorCode::DegenerateCovariate:
    case ErrorCode::IoFailure:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Numeric;
  }
}

}  // namespace qtomo
