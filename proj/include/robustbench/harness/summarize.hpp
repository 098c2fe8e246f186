#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustbench/harness/store.hpp"
#include "robustbench/metrics/metrics.hpp"

namespace robustbench {

struct StoredRun {
  std::filesystem::path dir;
  StoreHeader header;
  std::vector<EvalRecord> records;
  std::vector<JournalEntry> skipped;

  std::vector<std::string> model_ids() const;  // config order
  bool complete() const noexcept;
  LabeledOutcomes outcomes(const std::string& model_id) const;
};

StoredRun load_run(const std::filesystem::path& dir);

struct SkippedCell {
  std::string model_id;
  std::string sample_id;
  std::string kind;
  int severity_index = 0;
  int rep = 0;
  std::string error;
};

struct RunSummary {
  std::string run_id;
  std::optional<std::string> baseline_run_id;
  std::vector<std::string> labels;
  bool supervised = true;
  int reps = 1;
  // kind -> number of levels scheduled, surfaced as a declared choice.
  std::map<std::string, std::size_t, std::less<>> levels_per_kind;
  std::vector<RobustnessSummary> models;
  std::vector<SkippedCell> skipped;
};

struct SummarizeOptions {
  // Baseline model id inside the baseline run. When unset each model pairs
  // with the model of the same id, or with the only model of the baseline.
  std::optional<std::string> baseline_model;
  SummaryOptions metrics;
};

// Throws Error(IncompleteRun) for unfinished runs and
// Error(IncompatibleBaseline) when the baseline differs in dataset or plan.
RunSummary summarize_run(const StoredRun& run, const StoredRun* baseline,
                         const SummarizeOptions& options = {});

nlohmann::json summary_to_json(const RunSummary& summary);

}  // namespace robustbench
