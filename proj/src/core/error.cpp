#include "robustbench/error.hpp"

namespace robustbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::ImageIo: return "ImageIo";
    case ErrorCode::EmptyResponse: return "EmptyResponse";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::EmbeddingFailure: return "EmbeddingFailure";
    case ErrorCode::NoSamples: return "NoSamples";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::BaselineZeroError: return "BaselineZeroError";
    case ErrorCode::DegenerateBaselineDelta: return "DegenerateBaselineDelta";
    case ErrorCode::NoCorruptedCells: return "NoCorruptedCells";
    case ErrorCode::BaselineZeroFlips: return "BaselineZeroFlips";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::Unreadable: return "Unreadable";
    case ErrorCode::DuplicateSampleId: return "DuplicateSampleId";
    case ErrorCode::NoEntries: return "NoEntries";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::IncompatibleBaseline: return "IncompatibleBaseline";
    case ErrorCode::CorruptionError: return "CorruptionError";
    case ErrorCode::IncompleteRun: return "IncompleteRun";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::NoRows: return "NoRows";
    case ErrorCode::UnlabeledRun: return "UnlabeledRun";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace robustbench
