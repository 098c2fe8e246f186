#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robustbench {

// One corrupted evaluation of a sample: kind, grid level, repetition.
struct CellKey {
  std::string kind;
  int severity_index = 0;
  int rep = 0;

  auto operator<=>(const CellKey&) const = default;
};

struct SampleOutcome {
  std::string sample_id;
  std::optional<std::size_t> truth;
  std::size_t clean_prediction = 0;
  std::map<CellKey, std::size_t> corrupted;
};

struct LabeledOutcomes {
  std::size_t n_classes = 0;
  std::vector<SampleOutcome> samples;

  // True when every sample carries a true class.
  bool labeled() const noexcept;
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Macro-average of per-class recall over classes that have samples.
// Throws Error(NoSamples) when no class has a sample.
double balanced_accuracy(std::span<const std::size_t> truths,
                         std::span<const std::size_t> predicted, std::size_t n_classes);

// Misclassification rate of the clean predictions. Throws Error(MissingLabels).
double clean_error(const LabeledOutcomes& outcomes);

// Misclassification rate for one kind: averaged over samples within each
// (severity, rep) configuration, then over configurations.
double corruption_error(const LabeledOutcomes& outcomes, std::string_view kind);

struct ErrorTable {
  double clean_error = 0.0;
  std::map<std::string, double, std::less<>> per_corruption_error;
};

ErrorTable error_table(const LabeledOutcomes& outcomes);

// Kinds present in the outcomes, sorted.
std::vector<std::string> kinds_of(const LabeledOutcomes& outcomes);

struct RatioResult {
  double value = 0.0;
  std::vector<std::string> excluded;
  std::vector<std::string> advisories;
};

enum class DegeneratePolicy {
  Strict,   // throw on a zero baseline denominator
  Exclude,  // drop the kind from the mean and record an advisory
};

// Mean over kinds of err_f(c) / err_b(c). Throws Error(BaselineZeroError)
// under Strict when some baseline error is zero.
RatioResult mce(const ErrorTable& model, const ErrorTable& baseline,
                std::span<const std::string> kinds, DegeneratePolicy policy = DegeneratePolicy::Strict);

// Mean over kinds of (err_f(c) - err_f) / (err_b(c) - err_b). Throws
// Error(DegenerateBaselineDelta) under Strict when a baseline delta is zero
// (|delta| <= 1e-12, which absorbs rounding of equal rates).
RatioResult rce(const ErrorTable& model, const ErrorTable& baseline,
                std::span<const std::string> kinds,
                DegeneratePolicy policy = DegeneratePolicy::Exclude);

// Fraction of a sample's corrupted cells whose prediction differs from the
// clean prediction. No labels needed. Throws Error(NoCorruptedCells).
double flip_probability(const SampleOutcome& sample);
double flip_probability(const LabeledOutcomes& outcomes, std::string_view sample_id);

// Mean of per-sample flip probability over samples with at least one cell;
// `kind` restricts cells to one corruption kind.
double dataset_flip_rate(const LabeledOutcomes& outcomes);
double dataset_flip_rate(const LabeledOutcomes& outcomes, std::string_view kind);

// fp_model / fp_baseline. Throws Error(BaselineZeroFlips).
double mfr(double fp_model, double fp_baseline);

// Sample Pearson correlation. Throws Error(DegenerateVariance) for fewer than
// two points or a constant series, Error(NoSamples) on length mismatch.
double pearson_r(std::span<const double> a, std::span<const double> b);

// One point per (kind, severity): balanced accuracy averaged over reps (when
// labeled) and flip probability averaged over samples and reps.
struct CellPoint {
  std::string kind;
  int severity_index = 0;
  std::optional<double> balanced_accuracy;
  double flip_probability = 0.0;
  std::size_t n_cells = 0;
};

std::vector<CellPoint> cell_series(const LabeledOutcomes& outcomes);

// Correlation between per-cell balanced accuracy and per-cell flip probability.
double accuracy_flip_correlation(std::span<const CellPoint> cells);

struct RobustnessSummary {
  std::string model_id;
  std::size_t n_samples = 0;
  std::size_t n_corrupted_cells = 0;

  std::optional<double> balanced_accuracy_clean;
  std::optional<double> clean_error;
  std::map<std::string, double, std::less<>> corruption_errors;

  double flip_rate = 0.0;
  std::map<std::string, double, std::less<>> flip_rate_per_kind;

  std::optional<std::string> baseline_model_id;
  std::optional<double> mce;
  std::optional<double> rce;
  std::optional<double> mfr;
  std::map<std::string, double, std::less<>> mfr_per_kind;

  std::optional<double> pearson_r;
  std::vector<CellPoint> cells;
  std::vector<std::string> advisories;
};

struct SummaryOptions {
  DegeneratePolicy mce_policy = DegeneratePolicy::Strict;
  DegeneratePolicy rce_policy = DegeneratePolicy::Exclude;
};

// Absolute metrics only (no baseline).
RobustnessSummary summarize_outcomes(std::string model_id, const LabeledOutcomes& outcomes);

// Adds mCE / rCE / mFR relative to `baseline`, which must cover the same kinds.
RobustnessSummary summarize_outcomes(std::string model_id, const LabeledOutcomes& outcomes,
                                     std::string baseline_id, const LabeledOutcomes& baseline,
                                     const SummaryOptions& options = {});

}  // namespace robustbench
