#include "robustbench/predictor/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "robustbench/error.hpp"

namespace robustbench {

double cosine_sim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

LabelSet::LabelSet(std::vector<std::string> labels, std::string prompt_template)
    : labels_(std::move(labels)), template_(std::move(prompt_template)) {
  if (labels_.empty()) throw Error(ErrorCode::InvalidConfig, "label set is empty");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidConfig, "duplicate label '" + l + "'");
  }
  const auto first = template_.find("{label}");
  if (first == std::string::npos || template_.find("{label}", first + 1) != std::string::npos) {
    throw Error(ErrorCode::InvalidConfig,
                "prompt template must contain exactly one {label} slot: '" + template_ + "'");
  }
}

std::string LabelSet::prompted(std::size_t index) const {
  std::string out = template_;
  out.replace(out.find("{label}"), 7, labels_.at(index));
  return out;
}

std::vector<std::string> LabelSet::prompted_texts() const {
  std::vector<std::string> out;
  out.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) out.push_back(prompted(i));
  return out;
}

}  // namespace robustbench
