#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustbench/image.hpp"
#include "robustbench/predictor/backend.hpp"
#include "robustbench/predictor/embedding.hpp"

namespace robustbench {

struct Prediction {
  std::size_t label = 0;
  std::vector<double> scores;
};

// argmax_i cos(image, texts[i]); ties go to the lowest index.
Prediction predict_from_embeddings(const Embedding& image, std::span<const Embedding> texts);

std::vector<Embedding> embed_texts(PredictorBackend& backend, const LabelSet& labels);
std::vector<Embedding> embed_images(PredictorBackend& backend, std::span<const RasterImage> images);

// One-shot zero-shot prediction; recomputes the text embeddings.
Prediction predict(PredictorBackend& backend, const RasterImage& image, const LabelSet& labels);

// Where in the run matrix an image comes from. Real models ignore this;
// synthetic predictors used for testing read it.
struct CellContext {
  std::string sample_id;
  bool clean = true;
  std::string kind;
  int severity_index = 0;
  int n_levels = 1;
  int rep = 0;
  // Clean prediction of the same model, set on corrupted cells.
  std::optional<std::size_t> clean_prediction;
};

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual const std::string& model_id() const = 0;
  virtual std::size_t n_labels() const = 0;
  virtual bool reentrant() const = 0;
  virtual Prediction classify(const RasterImage& image, const CellContext& ctx) = 0;
};

// Backend + label set, with the label text embeddings computed once.
class ZeroShotClassifier final : public Classifier {
 public:
  ZeroShotClassifier(std::string model_id, std::shared_ptr<PredictorBackend> backend,
                     LabelSet labels);

  const std::string& model_id() const override { return model_id_; }
  std::size_t n_labels() const override { return labels_.size(); }
  bool reentrant() const override { return backend_->info().reentrant; }
  Prediction classify(const RasterImage& image, const CellContext& ctx) override;

  const std::vector<Embedding>& text_embeddings() const noexcept { return text_embeddings_; }
  PredictorBackend& backend() noexcept { return *backend_; }

 private:
  std::string model_id_;
  std::shared_ptr<PredictorBackend> backend_;
  LabelSet labels_;
  std::vector<Embedding> text_embeddings_;
};

// Wraps a classifier and replaces its output on corrupted cells with a
// seeded random label with probability strength * severity / (levels - 1).
// The draw and the replacement label for a given (sample, kind, rep) are
// shared across severities, so the set of replaced cells grows with
// severity. With `hold_clean`, cells that are not replaced repeat the clean
// prediction instead of querying the base model.
class SeverityDegradingClassifier final : public Classifier {
 public:
  SeverityDegradingClassifier(std::string model_id, std::unique_ptr<Classifier> base,
                              std::uint64_t seed, double strength = 1.0, bool hold_clean = false);

  const std::string& model_id() const override { return model_id_; }
  std::size_t n_labels() const override { return base_->n_labels(); }
  bool reentrant() const override { return base_->reentrant(); }
  Prediction classify(const RasterImage& image, const CellContext& ctx) override;

  // Probability of replacement at a severity, exposed for tests.
  double replacement_probability(int severity_index, int n_levels) const noexcept;

 private:
  std::string model_id_;
  std::unique_ptr<Classifier> base_;
  std::uint64_t seed_;
  double strength_;
  bool hold_clean_;
};

}  // namespace robustbench
