#include "robustbench/hash.hpp"
#include "robustbench/predictor/classifier.hpp"
#include "robustbench/rng.hpp"

namespace robustbench {

namespace {

double unit_hash(std::uint64_t seed, const std::string& key) {
  const std::uint64_t h = mix64(seed ^ fnv1a64(key));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

SeverityDegradingClassifier::SeverityDegradingClassifier(std::string model_id,
                                                         std::unique_ptr<Classifier> base,
                                                         std::uint64_t seed, double strength,
                                                         bool hold_clean)
    : model_id_(std::move(model_id)),
      base_(std::move(base)),
      seed_(seed),
      strength_(strength),
      hold_clean_(hold_clean) {}

double SeverityDegradingClassifier::replacement_probability(int severity_index,
                                                            int n_levels) const noexcept {
  if (n_levels <= 1) return strength_;
  return strength_ * static_cast<double>(severity_index) / static_cast<double>(n_levels - 1);
}

Prediction SeverityDegradingClassifier::classify(const RasterImage& image, const CellContext& ctx) {
  if (ctx.clean) return base_->classify(image, ctx);
  const std::string cell = ctx.sample_id + "|" + ctx.kind + "|" + std::to_string(ctx.rep);
  const double u = unit_hash(seed_, cell);
  if (u < replacement_probability(ctx.severity_index, ctx.n_levels)) {
    const std::uint64_t h = mix64(seed_ ^ fnv1a64(cell) ^ 0x5bd1e995ULL);
    return Prediction{static_cast<std::size_t>(h % n_labels()), {}};
  }
  if (hold_clean_ && ctx.clean_prediction) return Prediction{*ctx.clean_prediction, {}};
  return base_->classify(image, ctx);
}

}  // namespace robustbench
