#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace robustbench {

struct Embedding {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

// dot(a,b) / (|a| |b|). Throws Error(ZeroVector) or Error(DimensionMismatch).
double cosine_sim(const Embedding& a, const Embedding& b);

// Ordered class names plus the text template with a single "{label}" slot.
// Order is significant: it is the tie-break order of the argmax.
class LabelSet {
 public:
  static constexpr const char* kDefaultTemplate = "a photo of a {label}";

  explicit LabelSet(std::vector<std::string> labels,
                    std::string prompt_template = kDefaultTemplate);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& prompt_template() const noexcept { return template_; }

  std::string prompted(std::size_t index) const;
  std::vector<std::string> prompted_texts() const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
  std::string template_;
};

}  // namespace robustbench
