#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "robustbench/image.hpp"
#include "robustbench/predictor/embedding.hpp"

namespace robustbench {

enum class BackendKind { Toy, EmbedFile, HttpService };

std::string_view to_string(BackendKind kind);

struct BackendInfo {
  BackendKind kind;
  std::size_t dim = 0;
  std::string model;
  int resolution = 0;
  // True when embed_* may be called from several threads at once.
  bool reentrant = true;
};

// Image encoder and text encoder of a contrastive model. Backends own any
// model-specific preprocessing (resize, normalisation).
class PredictorBackend {
 public:
  virtual ~PredictorBackend() = default;

  virtual const BackendInfo& info() const = 0;
  virtual std::vector<Embedding> embed_images(std::span<const RasterImage> images) = 0;
  virtual std::vector<Embedding> embed_texts(std::span<const std::string> texts) = 0;
};

// Deterministic stand-in model. Text embeddings of the label set are rows of
// a seeded random orthonormal basis; an image embeds as a seeded random
// linear projection of its standardised 16x16 grayscale thumbnail, its mean
// luminance and a bias term.
std::shared_ptr<PredictorBackend> toy_predictor(std::uint64_t seed, const LabelSet& labels,
                                                std::size_t dim = 32);

// Replays vectors from a JSONL file of {key, kind:"image"|"text", dim, values}.
// Image keys are content_hash() of the (corrupted) image; text keys are the
// prompted label strings.
std::shared_ptr<PredictorBackend> embed_file_backend(const std::filesystem::path& path);

struct HttpBackendOptions {
  std::string base_url;   // e.g. http://127.0.0.1:8080
  std::string model;      // sent in every request; empty uses the server's model
  int max_in_flight = 4;
  int timeout_seconds = 60;
};

// Client of the embedding service (/v1/health, /v1/embed/image, /v1/embed/text).
// Throws Error(BackendUnavailable) if the health check fails.
std::shared_ptr<PredictorBackend> http_backend(const HttpBackendOptions& options);

}  // namespace robustbench
