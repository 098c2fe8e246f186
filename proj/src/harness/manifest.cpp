#include "robustbench/harness/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "robustbench/error.hpp"
#include "robustbench/hash.hpp"
#include "robustbench/image_io.hpp"
#include "robustbench/rng.hpp"

namespace robustbench {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// RFC 4180 field splitting for a single line (no embedded newlines).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::vector<ManifestEntry> scan_directory(const fs::path& root) {
  std::vector<ManifestEntry> out;
  std::error_code ec;
  for (const auto& cls : fs::directory_iterator(root, ec)) {
    if (!cls.is_directory()) continue;
    const std::string class_name = cls.path().filename().string();
    for (const auto& file : fs::directory_iterator(cls.path())) {
      if (!file.is_regular_file() || !is_image_file(file.path())) continue;
      const fs::path rel = fs::relative(file.path(), root);
      out.push_back({rel.generic_string(), rel, class_name});
    }
  }
  if (ec) throw Error(ErrorCode::Unreadable, "cannot list " + root.string() + ": " + ec.message());
  return out;
}

std::vector<ManifestEntry> parse_csv(std::istream& in, const fs::path& source) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv(line);
  auto column = [&](std::initializer_list<const char*> names) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      for (const char* n : names)
        if (header[i] == n) return static_cast<int>(i);
    return -1;
  };
  const int id_col = column({"id", "sample_id"});
  const int path_col = column({"path", "file"});
  const int class_col = column({"class", "label"});
  if (id_col < 0 || path_col < 0) {
    throw Error(ErrorCode::Unreadable, source.string() + ": CSV header needs 'id' and 'path' columns");
  }
  std::vector<ManifestEntry> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    const auto need = static_cast<std::size_t>(std::max(id_col, path_col));
    if (f.size() <= need || f[id_col].empty() || f[path_col].empty()) {
      throw Error(ErrorCode::Unreadable,
                  source.string() + ":" + std::to_string(line_no) + ": missing id or path");
    }
    ManifestEntry e{f[id_col], fs::path(f[path_col]), std::nullopt};
    if (class_col >= 0 && static_cast<std::size_t>(class_col) < f.size() && !f[class_col].empty()) {
      e.class_name = f[class_col];
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> parse_jsonl(std::istream& in, const fs::path& source) {
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e{j.at("id").get<std::string>(), fs::path(j.at("path").get<std::string>()),
                      std::nullopt};
      if (j.contains("class") && !j["class"].is_null()) e.class_name = j["class"].get<std::string>();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::Unreadable,
                  source.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace

bool DatasetManifest::supervised() const noexcept {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const ManifestEntry& e) { return e.class_name.has_value(); });
}

fs::path DatasetManifest::path_of(const ManifestEntry& entry) const {
  return entry.relative_path.is_absolute() ? entry.relative_path : root / entry.relative_path;
}

std::optional<std::size_t> DatasetManifest::class_index(const ManifestEntry& entry) const {
  if (!entry.class_name) return std::nullopt;
  const auto it = std::lower_bound(class_names.begin(), class_names.end(), *entry.class_name);
  if (it == class_names.end() || *it != *entry.class_name) return std::nullopt;
  return static_cast<std::size_t>(it - class_names.begin());
}

DatasetManifest load_manifest(const fs::path& path, const ManifestOptions& options) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::Unreadable, "no such dataset: " + path.string());

  DatasetManifest m;
  if (fs::is_directory(path)) {
    m.root = path;
    m.entries = scan_directory(path);
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Unreadable, "cannot open " + path.string());
    m.root = path.parent_path();
    m.entries = path.extension() == ".jsonl" ? parse_jsonl(in, path) : parse_csv(in, path);
  }
  if (m.entries.empty()) throw Error(ErrorCode::NoEntries, path.string() + " lists no images");

  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.sample_id < b.sample_id; });
  for (std::size_t i = 1; i < m.entries.size(); ++i) {
    if (m.entries[i].sample_id == m.entries[i - 1].sample_id) {
      throw Error(ErrorCode::DuplicateSampleId, "duplicate sample id '" + m.entries[i].sample_id + "'");
    }
  }

  std::set<std::string> classes;
  for (const auto& e : m.entries) {
    if (e.class_name) classes.insert(*e.class_name);
    if (!fs::is_regular_file(m.path_of(e), ec)) {
      throw Error(ErrorCode::Unreadable, "sample '" + e.sample_id + "': missing file " + m.path_of(e).string());
    }
  }
  m.class_names.assign(classes.begin(), classes.end());

  // Decode a fixed pseudo-random subset.
  std::vector<std::size_t> order(m.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Xoshiro256 rng(fnv1a64(path.generic_string()));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.bounded(i)]);
  const std::size_t n_check = std::min(options.decode_check, order.size());
  for (std::size_t i = 0; i < n_check; ++i) {
    const auto& e = m.entries[order[i]];
    try {
      (void)read_image(m.path_of(e));
    } catch (const Error& ex) {
      throw Error(ErrorCode::Unreadable, "sample '" + e.sample_id + "': " + ex.what());
    }
  }
  return m;
}

std::string dataset_hash(const DatasetManifest& manifest) {
  std::string rows;
  for (const auto& e : manifest.entries) {
    std::ifstream in(manifest.path_of(e), std::ios::binary);
    if (!in) throw Error(ErrorCode::Unreadable, "cannot open " + manifest.path_of(e).string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    rows += e.sample_id;
    rows += '\t';
    rows += e.relative_path.generic_string();
    rows += '\t';
    rows += e.class_name.value_or("");
    rows += '\t';
    rows += sha256_hex(bytes);
    rows += '\n';
  }
  return sha256_hex(rows);
}

}  // namespace robustbench
