#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace robustbench {

struct ManifestEntry {
  std::string sample_id;
  std::filesystem::path relative_path;
  std::optional<std::string> class_name;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;  // sorted, unique

  // True when every entry carries a class.
  bool supervised() const noexcept;
  std::filesystem::path path_of(const ManifestEntry& entry) const;
  std::optional<std::size_t> class_index(const ManifestEntry& entry) const;
};

struct ManifestOptions {
  // Number of entries decoded at load time to catch unreadable images early.
  std::size_t decode_check = 8;
};

// Accepts a directory laid out as <root>/<class>/<image>, a CSV file with a
// header naming `id`, `path` and optionally `class`, or a JSONL file of
// {"id", "path", "class"?} objects. Relative paths resolve against the
// manifest file's directory. Entries come back sorted by sample id.
// Throws Error(Unreadable), Error(DuplicateSampleId) or Error(NoEntries).
DatasetManifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});

// SHA-256 over the sorted (id, path, class, file digest) rows.
std::string dataset_hash(const DatasetManifest& manifest);

}  // namespace robustbench
