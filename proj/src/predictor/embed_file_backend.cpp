#include <fstream>
#include <map>

#include <json.hpp>

#include "robustbench/error.hpp"
#include "robustbench/predictor/backend.hpp"

namespace robustbench {

namespace {

using Table = std::map<std::string, std::vector<double>, std::less<>>;

class EmbedFileBackend final : public PredictorBackend {
 public:
  explicit EmbedFileBackend(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BackendUnavailable, "cannot open embedding file " + path.string());
    info_ = BackendInfo{BackendKind::EmbedFile, 0, path.filename().string(), 0, true};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = path.string() + ":" + std::to_string(line_no);
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::EmbeddingFailure, where + ": " + e.what());
      }
      const auto key = rec.at("key").get<std::string>();
      const auto kind = rec.at("kind").get<std::string>();
      auto values = rec.at("values").get<std::vector<double>>();
      const auto dim = rec.at("dim").get<std::size_t>();
      if (values.size() != dim) {
        throw Error(ErrorCode::EmbeddingFailure, where + ": dim field disagrees with values");
      }
      if (info_.dim == 0) info_.dim = dim;
      if (dim != info_.dim) {
        throw Error(ErrorCode::DimensionMismatch, where + ": dim " + std::to_string(dim) +
                                                      " != " + std::to_string(info_.dim));
      }
      Table* table = kind == "image" ? &images_ : kind == "text" ? &texts_ : nullptr;
      if (!table) throw Error(ErrorCode::EmbeddingFailure, where + ": unknown kind '" + kind + "'");
      (*table)[key] = std::move(values);
    }
    if (info_.dim == 0) throw Error(ErrorCode::BackendUnavailable, path.string() + " has no records");
  }

  const BackendInfo& info() const override { return info_; }

  std::vector<Embedding> embed_images(std::span<const RasterImage> images) override {
    std::vector<Embedding> out;
    for (const auto& img : images) out.push_back(lookup(images_, content_hash(img), "image"));
    return out;
  }

  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override {
    std::vector<Embedding> out;
    for (const auto& t : texts) out.push_back(lookup(texts_, t, "text"));
    return out;
  }

 private:
  static Embedding lookup(const Table& table, const std::string& key, const char* kind) {
    const auto it = table.find(key);
    if (it == table.end()) {
      throw Error(ErrorCode::EmbeddingFailure,
                  std::string("no ") + kind + " embedding recorded for key '" + key + "'");
    }
    return Embedding{it->second};
  }

  BackendInfo info_;
  Table images_;
  Table texts_;
};

}  // namespace

std::shared_ptr<PredictorBackend> embed_file_backend(const std::filesystem::path& path) {
  return std::make_shared<EmbedFileBackend>(path);
}

}  // namespace robustbench
