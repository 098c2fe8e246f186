#include "robustbench/predictor/classifier.hpp"

#include "robustbench/error.hpp"

namespace robustbench {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Toy: return "toy";
    case BackendKind::EmbedFile: return "embed_file";
    case BackendKind::HttpService: return "http_service";
  }
  return "unknown";
}

Prediction predict_from_embeddings(const Embedding& image, std::span<const Embedding> texts) {
  if (texts.empty()) throw Error(ErrorCode::InvalidConfig, "no label embeddings");
  Prediction p;
  p.scores.reserve(texts.size());
  for (const auto& t : texts) p.scores.push_back(cosine_sim(image, t));
  for (std::size_t i = 1; i < p.scores.size(); ++i) {
    if (p.scores[i] > p.scores[p.label]) p.label = i;
  }
  return p;
}

std::vector<Embedding> embed_texts(PredictorBackend& backend, const LabelSet& labels) {
  const auto texts = labels.prompted_texts();
  auto out = backend.embed_texts(texts);
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::EmbeddingFailure, "backend returned " + std::to_string(out.size()) +
                                                 " text embeddings for " +
                                                 std::to_string(texts.size()) + " labels");
  }
  for (const auto& e : out) {
    if (e.dim() != backend.info().dim) {
      throw Error(ErrorCode::DimensionMismatch, "text embedding dim " + std::to_string(e.dim()) +
                                                    " != backend dim " +
                                                    std::to_string(backend.info().dim));
    }
  }
  return out;
}

std::vector<Embedding> embed_images(PredictorBackend& backend, std::span<const RasterImage> images) {
  auto out = backend.embed_images(images);
  if (out.size() != images.size()) {
    throw Error(ErrorCode::EmbeddingFailure, "backend returned " + std::to_string(out.size()) +
                                                 " image embeddings for " +
                                                 std::to_string(images.size()) + " images");
  }
  for (const auto& e : out) {
    if (e.dim() != backend.info().dim) {
      throw Error(ErrorCode::DimensionMismatch, "image embedding dim " + std::to_string(e.dim()) +
                                                    " != backend dim " +
                                                    std::to_string(backend.info().dim));
    }
  }
  return out;
}

Prediction predict(PredictorBackend& backend, const RasterImage& image, const LabelSet& labels) {
  const auto texts = embed_texts(backend, labels);
  const auto images = embed_images(backend, std::span(&image, 1));
  return predict_from_embeddings(images.front(), texts);
}

ZeroShotClassifier::ZeroShotClassifier(std::string model_id,
                                       std::shared_ptr<PredictorBackend> backend, LabelSet labels)
    : model_id_(std::move(model_id)), backend_(std::move(backend)), labels_(std::move(labels)) {
  text_embeddings_ = embed_texts(*backend_, labels_);
}

Prediction ZeroShotClassifier::classify(const RasterImage& image, const CellContext& ctx) {
  try {
    const auto emb = embed_images(*backend_, std::span(&image, 1));
    return predict_from_embeddings(emb.front(), text_embeddings_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BackendUnavailable) throw;
    throw Error(ErrorCode::EmbeddingFailure, "sample '" + ctx.sample_id + "': " + e.what());
  }
}

}  // namespace robustbench
