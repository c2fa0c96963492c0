#include "korea/errors.hpp"

namespace korea {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DofTooSmall: return "DofTooSmall";
    case ErrorCode::NotSimplex: return "NotSimplex";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::AllRestartsFailed: return "AllRestartsFailed";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::DatasetUnavailable: return "DatasetUnavailable";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace korea
