#include <algorithm>
#include <cmath>
#include <map>

#include "robustbench/error.hpp"
#include "robustbench/predictor/backend.hpp"
#include "robustbench/rng.hpp"

namespace robustbench {

namespace {

constexpr int kThumb = 16;
constexpr std::size_t kPixels = kThumb * kThumb;
// Standardised thumbnail, mean luminance, bias.
constexpr std::size_t kFeatures = kPixels + 2;

class ToyBackend final : public PredictorBackend {
 public:
  ToyBackend(std::uint64_t seed, const LabelSet& labels, std::size_t dim)
      : info_{BackendKind::Toy, dim, "toy-" + std::to_string(seed), kThumb, true} {
    if (dim < 2) throw Error(ErrorCode::InvalidConfig, "toy dimension must be >= 2");
    if (labels.size() > dim) {
      throw Error(ErrorCode::InvalidConfig, "toy predictor needs dim >= number of labels");
    }
    Xoshiro256 text_rng(seed ^ 0x7465787400000000ULL);
    std::vector<std::vector<double>> basis;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::vector<double> v(dim);
      for (auto& x : v) x = text_rng.normal();
      // Two Gram-Schmidt passes keep the rows orthogonal to rounding error.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
          double dot = 0.0;
          for (std::size_t k = 0; k < dim; ++k) dot += v[k] * b[k];
          for (std::size_t k = 0; k < dim; ++k) v[k] -= dot * b[k];
        }
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      for (auto& x : v) x /= norm;
      basis.push_back(v);
      texts_[labels.prompted(i)] = basis.back();
      texts_.emplace(labels.labels()[i], basis.back());
    }
    Xoshiro256 proj_rng(seed ^ 0x696d616765000000ULL);
    projection_.resize(dim * kFeatures);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kFeatures));
    for (auto& x : projection_) x = proj_rng.normal() * scale;
  }

  const BackendInfo& info() const override { return info_; }

  std::vector<Embedding> embed_images(std::span<const RasterImage> images) override {
    std::vector<Embedding> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(embed(img));
    return out;
  }

  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      const auto it = texts_.find(t);
      if (it == texts_.end()) {
        throw Error(ErrorCode::EmbeddingFailure, "toy backend has no embedding for '" + t + "'");
      }
      out.push_back(Embedding{it->second});
    }
    return out;
  }

 private:
  Embedding embed(const RasterImage& img) const {
    std::vector<double> feat(kFeatures, 0.0);
    const int w = img.width();
    const int h = img.height();
    // Area average over each thumbnail cell; cells narrower than a pixel take
    // the nearest pixel.
    auto cell = [](int t, int extent) {
      int lo = t * extent / kThumb;
      int hi = (t + 1) * extent / kThumb;
      if (hi <= lo) {
        lo = std::min(extent - 1, (2 * t + 1) * extent / (2 * kThumb));
        hi = lo + 1;
      }
      return std::pair{lo, hi};
    };
    for (int ty = 0; ty < kThumb; ++ty) {
      const auto [y0, y1] = cell(ty, h);
      for (int tx = 0; tx < kThumb; ++tx) {
        const auto [x0, x1] = cell(tx, w);
        double sum = 0.0;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x)
            sum += 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
        feat[static_cast<std::size_t>(ty * kThumb + tx)] =
            sum / (255.0 * (x1 - x0) * (y1 - y0));
      }
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < kPixels; ++i) mean += feat[i];
    mean /= kPixels;
    double var = 0.0;
    for (std::size_t i = 0; i < kPixels; ++i) var += (feat[i] - mean) * (feat[i] - mean);
    const double sd = std::sqrt(var / kPixels);
    for (std::size_t i = 0; i < kPixels; ++i) feat[i] = sd > 1e-9 ? (feat[i] - mean) / sd : 0.0;
    feat[kPixels] = mean;
    feat[kPixels + 1] = 1.0;
    Embedding e;
    e.values.assign(info_.dim, 0.0);
    for (std::size_t r = 0; r < info_.dim; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kFeatures; ++k) acc += projection_[r * kFeatures + k] * feat[k];
      e.values[r] = acc;
    }
    return e;
  }

  BackendInfo info_;
  std::map<std::string, std::vector<double>, std::less<>> texts_;
  std::vector<double> projection_;
};

}  // namespace

std::shared_ptr<PredictorBackend> toy_predictor(std::uint64_t seed, const LabelSet& labels,
                                                std::size_t dim) {
  return std::make_shared<ToyBackend>(seed, labels, dim);
}

}  // namespace robustbench
