#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robustbench {

enum class ErrorCode {
  // corruption engine
  UnknownKind,
  InvalidParams,
  InvalidImage,
  ImageIo,
  // planner
  EmptyResponse,
  TransportError,
  // predictor
  ZeroVector,
  DimensionMismatch,
  BackendUnavailable,
  EmbeddingFailure,
  // metrics
  NoSamples,
  MissingLabels,
  BaselineZeroError,
  DegenerateBaselineDelta,
  NoCorruptedCells,
  BaselineZeroFlips,
  DegenerateVariance,
  // harness
  Unreadable,
  DuplicateSampleId,
  NoEntries,
  InvalidConfig,
  StoreCorrupt,
  IncompatibleBaseline,
  CorruptionError,
  IncompleteRun,
  // report
  MissingBaseline,
  NoRows,
  UnlabeledRun,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robustbench
