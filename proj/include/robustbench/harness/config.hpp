#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustbench/corruption/catalog.hpp"
#include "robustbench/corruption/params.hpp"
#include "robustbench/predictor/classifier.hpp"

namespace robustbench {

struct DegradeSpec {
  std::uint64_t seed = 0;
  double strength = 1.0;
  bool hold_clean = false;
};

// One model of a run. `type` is "toy", "embed_file" or "http_service".
struct BackendDescriptor {
  std::string model_id;
  std::string type;
  std::uint64_t seed = 0;                 // toy
  std::size_t dim = 32;                   // toy
  std::filesystem::path embeddings;       // embed_file
  std::string url;                        // http_service; falls back to RB_EMBED_URL
  std::string model;                      // http_service
  int max_in_flight = 4;                  // http_service
  std::optional<DegradeSpec> degrade;
};

// A kind scheduled in a run, with its levels and the grid indices to run.
struct KindSchedule {
  CorruptionKind kind;
  std::vector<ParamMap> levels;
  std::vector<int> severities;
};

struct RunConfig {
  std::filesystem::path dataset;
  std::vector<BackendDescriptor> models;
  std::string label_template = "a photo of a {label}";
  std::optional<std::vector<std::string>> labels;
  std::optional<std::filesystem::path> plan;
  std::vector<KindSchedule> schedule;  // resolved from plan or explicit kinds
  int reps = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "runs";
  std::string run_id;
  int workers = 1;
  bool keep_images = false;
  std::optional<std::string> baseline_run;
  std::optional<std::string> baseline_model;

  std::size_t cells_per_sample() const noexcept;
};

// Relative paths in `j` resolve against `base_dir`. Throws Error(InvalidConfig).
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Full resolved form, with absolute paths; parse_run_config round-trips it.
nlohmann::json run_config_to_json(const RunConfig& config);

// SHA-256 of the fields that determine the record set. Worker count, output
// location, image retention and service URLs do not enter it.
std::string config_hash(const RunConfig& config);

// Instance seed of a cell: mix64(master_seed ^ fnv1a64(sample_id + US + kind
// + US + severity + US + rep)), US being the 0x1f unit separator and the
// integers written in decimal.
std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view sample_id,
                        std::string_view kind, int severity_index, int rep);

std::unique_ptr<Classifier> make_classifier(const BackendDescriptor& descriptor,
                                            const LabelSet& labels);

}  // namespace robustbench
