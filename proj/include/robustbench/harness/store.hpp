#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

namespace robustbench {

// Identity of a record within a run. Clean records have an empty kind and
// severity_index = rep = -1.
struct UnitKey {
  std::string model_id;
  std::string sample_id;
  std::string kind;
  int severity_index = -1;
  int rep = -1;

  bool clean() const noexcept { return kind.empty(); }
  auto operator<=>(const UnitKey&) const = default;
};

struct EvalRecord {
  std::string run_id;
  UnitKey key;
  std::uint64_t seed = 0;
  std::size_t clean_prediction = 0;
  std::optional<std::size_t> prediction;  // absent on clean records
  std::optional<std::size_t> truth;
  std::string timestamp;
};

nlohmann::json record_to_json(const EvalRecord& record);
EvalRecord record_from_json(const nlohmann::json& j);

struct JournalEntry {
  UnitKey key;
  bool skipped = false;
  std::string error;
};

struct StoreHeader {
  std::string run_id;
  std::string config_hash;
  std::string dataset_hash;
  nlohmann::json config;        // run_config_to_json form
  std::vector<std::string> labels;
  bool supervised = true;
  std::size_t n_samples = 0;
  std::size_t expected_units = 0;
  std::string created_at;
};

nlohmann::json header_to_json(const StoreHeader& header);
StoreHeader header_from_json(const nlohmann::json& j);

struct StoreContents {
  StoreHeader header;
  std::vector<EvalRecord> records;
  std::vector<JournalEntry> journal;
};

// Read-only load of <dir>/header.json, records.jsonl and journal.jsonl. A
// torn final line is ignored; structural damage throws Error(StoreCorrupt).
StoreContents read_store(const std::filesystem::path& dir);

// Append-only writer. Opening repairs a crash tail: a torn final line, and
// records past the last journaled one, are cut off. Every journal "done"
// entry must match a record and every record a journal entry, otherwise
// Error(StoreCorrupt).
class RunStore {
 public:
  // Creates the directory and header, or reopens an existing store whose
  // header matches `header` on config and dataset hash.
  RunStore(const std::filesystem::path& dir, const StoreHeader& header);
  ~RunStore();
  RunStore(const RunStore&) = delete;
  RunStore& operator=(const RunStore&) = delete;

  const std::set<UnitKey>& completed() const noexcept { return completed_; }
  // Clean prediction already stored for (model, sample), if any.
  std::optional<std::size_t> clean_prediction(const std::string& model_id,
                                              const std::string& sample_id) const;

  // Appends and flushes the record, then its journal line. Not thread-safe.
  void append(const EvalRecord& record);
  void append_skipped(const UnitKey& key, const std::string& error);

  std::size_t n_records() const noexcept { return n_records_; }

 private:
  std::filesystem::path dir_;
  std::FILE* records_ = nullptr;
  std::FILE* journal_ = nullptr;
  std::set<UnitKey> completed_;
  std::map<std::pair<std::string, std::string>, std::size_t> clean_;
  std::size_t n_records_ = 0;
};

// Header hashes, records and journal without timestamps, each sorted. Two
// stores hold the same results when these strings are equal.
std::string canonical_store(const std::filesystem::path& dir);

std::string utc_timestamp();

}  // namespace robustbench
