#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "robustbench/harness/config.hpp"
#include "robustbench/harness/manifest.hpp"

namespace robustbench {

struct RunOptions {
  // Stop after committing this many new records, leaving a resumable store.
  std::optional<std::size_t> max_new_records;
  ManifestOptions manifest;
};

struct RunResult {
  std::string run_id;
  std::filesystem::path store_dir;
  std::size_t new_records = 0;
  std::size_t new_skipped = 0;
  std::size_t total_records = 0;
  std::size_t expected_units = 0;
  bool complete = false;
};

// Executes every missing (model, sample, kind, severity, rep) unit of the
// run matrix. An existing store with the same config hash is resumed; a
// different hash throws Error(StoreCorrupt). Error(BackendUnavailable) halts
// the run with committed work kept.
RunResult run(const RunConfig& config, const RunOptions& options = {});

// Continues the run stored at `store_dir` from its own header. When
// `config` is given its hash must equal the stored one.
RunResult resume(const std::filesystem::path& store_dir,
                 const std::optional<RunConfig>& config = std::nullopt,
                 const RunOptions& options = {});

std::filesystem::path store_dir_of(const RunConfig& config);

}  // namespace robustbench
