#include "robustbench/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "robustbench/error.hpp"

namespace robustbench {

namespace {

std::size_t require_truth(const SampleOutcome& s) {
  if (!s.truth) {
    throw Error(ErrorCode::MissingLabels, "sample '" + s.sample_id + "' has no true class");
  }
  return *s.truth;
}

// (severity, rep) -> (wrong-count sum, n) for one kind.
std::map<std::pair<int, int>, std::pair<CompensatedSum, std::size_t>> configurations(
    const LabeledOutcomes& outcomes, std::string_view kind) {
  std::map<std::pair<int, int>, std::pair<CompensatedSum, std::size_t>> configs;
  for (const auto& s : outcomes.samples) {
    for (const auto& [cell, pred] : s.corrupted) {
      if (cell.kind != kind) continue;
      const std::size_t truth = require_truth(s);
      auto& [sum, n] = configs[{cell.severity_index, cell.rep}];
      sum.add(pred != truth ? 1.0 : 0.0);
      ++n;
    }
  }
  return configs;
}

double mean_of(const std::vector<double>& xs) {
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  return sum.value() / static_cast<double>(xs.size());
}

// Error rates are ratios of small integers; a difference of two of them
// below this is rounding residue of an exact zero.
constexpr double kZeroDenominator = 1e-12;

template <typename Ratio>
RatioResult mean_ratio(std::span<const std::string> kinds, DegeneratePolicy policy,
                       ErrorCode degenerate_code, const char* what, Ratio ratio_of) {
  RatioResult result;
  std::vector<double> ratios;
  for (const auto& kind : kinds) {
    double numerator = 0.0;
    double denominator = 0.0;
    ratio_of(kind, numerator, denominator);
    if (std::abs(denominator) <= kZeroDenominator) {
      const std::string msg = std::string(what) + ": baseline denominator is zero for " + kind;
      if (policy == DegeneratePolicy::Strict) throw Error(degenerate_code, msg);
      result.excluded.push_back(kind);
      result.advisories.push_back(msg + " (kind excluded)");
      continue;
    }
    ratios.push_back(numerator / denominator);
  }
  if (ratios.empty()) {
    throw Error(degenerate_code, std::string(what) + ": no kind with a usable baseline");
  }
  result.value = mean_of(ratios);
  return result;
}

int flips_for(const SampleOutcome& s, std::string_view kind, std::size_t& cells) {
  int flips = 0;
  cells = 0;
  for (const auto& [cell, pred] : s.corrupted) {
    if (!kind.empty() && cell.kind != kind) continue;
    ++cells;
    if (pred != s.clean_prediction) ++flips;
  }
  return flips;
}

double flip_rate_impl(const LabeledOutcomes& outcomes, std::string_view kind) {
  CompensatedSum sum;
  std::size_t n = 0;
  for (const auto& s : outcomes.samples) {
    std::size_t cells = 0;
    const int flips = flips_for(s, kind, cells);
    if (cells == 0) continue;
    sum.add(static_cast<double>(flips) / static_cast<double>(cells));
    ++n;
  }
  if (n == 0) {
    throw Error(ErrorCode::NoCorruptedCells,
                kind.empty() ? std::string("no corrupted cells in outcomes")
                             : "no corrupted cells for kind " + std::string(kind));
  }
  return sum.value() / static_cast<double>(n);
}

}  // namespace

bool LabeledOutcomes::labeled() const noexcept {
  return !samples.empty() &&
         std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.truth.has_value(); });
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double balanced_accuracy(std::span<const std::size_t> truths,
                         std::span<const std::size_t> predicted, std::size_t n_classes) {
  if (truths.size() != predicted.size()) {
    throw Error(ErrorCode::NoSamples, "truth/prediction length mismatch");
  }
  std::vector<std::size_t> total(n_classes, 0);
  std::vector<std::size_t> correct(n_classes, 0);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= n_classes) {
      throw Error(ErrorCode::NoSamples, "class index " + std::to_string(truths[i]) +
                                            " outside [0, " + std::to_string(n_classes) + ")");
    }
    ++total[truths[i]];
    if (predicted[i] == truths[i]) ++correct[truths[i]];
  }
  CompensatedSum recall_sum;
  std::size_t classes = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (total[c] == 0) continue;
    recall_sum.add(static_cast<double>(correct[c]) / static_cast<double>(total[c]));
    ++classes;
  }
  if (classes == 0) throw Error(ErrorCode::NoSamples, "no class has any sample");
  return recall_sum.value() / static_cast<double>(classes);
}

double clean_error(const LabeledOutcomes& outcomes) {
  if (outcomes.samples.empty()) throw Error(ErrorCode::NoSamples, "no samples");
  CompensatedSum wrong;
  for (const auto& s : outcomes.samples) wrong.add(s.clean_prediction != require_truth(s) ? 1.0 : 0.0);
  return wrong.value() / static_cast<double>(outcomes.samples.size());
}

double corruption_error(const LabeledOutcomes& outcomes, std::string_view kind) {
  const auto configs = configurations(outcomes, kind);
  if (configs.empty()) {
    throw Error(ErrorCode::NoCorruptedCells, "no cells for kind " + std::string(kind));
  }
  std::vector<double> rates;
  for (const auto& [key, acc] : configs) {
    rates.push_back(acc.first.value() / static_cast<double>(acc.second));
  }
  return mean_of(rates);
}

std::vector<std::string> kinds_of(const LabeledOutcomes& outcomes) {
  std::set<std::string> kinds;
  for (const auto& s : outcomes.samples)
    for (const auto& [cell, pred] : s.corrupted) kinds.insert(cell.kind);
  return {kinds.begin(), kinds.end()};
}

ErrorTable error_table(const LabeledOutcomes& outcomes) {
  ErrorTable t;
  t.clean_error = clean_error(outcomes);
  for (const auto& kind : kinds_of(outcomes)) {
    t.per_corruption_error[kind] = corruption_error(outcomes, kind);
  }
  return t;
}

namespace {

double lookup_error(const ErrorTable& t, const std::string& kind, const char* which) {
  const auto it = t.per_corruption_error.find(kind);
  if (it == t.per_corruption_error.end()) {
    throw Error(ErrorCode::IncompatibleBaseline,
                std::string(which) + " has no error entry for kind " + kind);
  }
  return it->second;
}

}  // namespace

RatioResult mce(const ErrorTable& model, const ErrorTable& baseline,
                std::span<const std::string> kinds, DegeneratePolicy policy) {
  return mean_ratio(kinds, policy, ErrorCode::BaselineZeroError, "mCE",
                    [&](const std::string& kind, double& num, double& den) {
                      num = lookup_error(model, kind, "model");
                      den = lookup_error(baseline, kind, "baseline");
                    });
}

RatioResult rce(const ErrorTable& model, const ErrorTable& baseline,
                std::span<const std::string> kinds, DegeneratePolicy policy) {
  return mean_ratio(kinds, policy, ErrorCode::DegenerateBaselineDelta, "rCE",
                    [&](const std::string& kind, double& num, double& den) {
                      num = lookup_error(model, kind, "model") - model.clean_error;
                      den = lookup_error(baseline, kind, "baseline") - baseline.clean_error;
                    });
}

double flip_probability(const SampleOutcome& sample) {
  std::size_t cells = 0;
  const int flips = flips_for(sample, {}, cells);
  if (cells == 0) {
    throw Error(ErrorCode::NoCorruptedCells, "sample '" + sample.sample_id + "' has no corrupted cells");
  }
  return static_cast<double>(flips) / static_cast<double>(cells);
}

double flip_probability(const LabeledOutcomes& outcomes, std::string_view sample_id) {
  for (const auto& s : outcomes.samples) {
    if (s.sample_id == sample_id) return flip_probability(s);
  }
  throw Error(ErrorCode::NoCorruptedCells, "unknown sample '" + std::string(sample_id) + "'");
}

double dataset_flip_rate(const LabeledOutcomes& outcomes) { return flip_rate_impl(outcomes, {}); }

double dataset_flip_rate(const LabeledOutcomes& outcomes, std::string_view kind) {
  if (kind.empty()) throw Error(ErrorCode::NoCorruptedCells, "empty kind name");
  return flip_rate_impl(outcomes, kind);
}

double mfr(double fp_model, double fp_baseline) {
  if (fp_baseline == 0.0) throw Error(ErrorCode::BaselineZeroFlips, "baseline flip rate is zero");
  return fp_model / fp_baseline;
}

double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::NoSamples, "series length mismatch");
  if (a.size() < 2) throw Error(ErrorCode::DegenerateVariance, "need at least two points");
  CompensatedSum sa;
  CompensatedSum sb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa.add(a[i]);
    sb.add(b[i]);
  }
  const double n = static_cast<double>(a.size());
  const double ma = sa.value() / n;
  const double mb = sb.value() / n;
  CompensatedSum sxy;
  CompensatedSum sxx;
  CompensatedSum syy;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sxy.add(da * db);
    sxx.add(da * da);
    syy.add(db * db);
  }
  if (sxx.value() == 0.0 || syy.value() == 0.0) {
    throw Error(ErrorCode::DegenerateVariance, "a series has zero variance");
  }
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

std::vector<CellPoint> cell_series(const LabeledOutcomes& outcomes) {
  struct RepGroup {
    std::vector<std::size_t> truths;
    std::vector<std::size_t> preds;
  };
  struct Acc {
    std::map<int, RepGroup> reps;
    CompensatedSum flips;
    std::size_t cells = 0;
  };
  std::map<std::pair<std::string, int>, Acc> groups;
  const bool labeled = outcomes.labeled();
  for (const auto& s : outcomes.samples) {
    for (const auto& [cell, pred] : s.corrupted) {
      Acc& acc = groups[{cell.kind, cell.severity_index}];
      acc.flips.add(pred != s.clean_prediction ? 1.0 : 0.0);
      ++acc.cells;
      if (labeled) {
        RepGroup& g = acc.reps[cell.rep];
        g.truths.push_back(*s.truth);
        g.preds.push_back(pred);
      }
    }
  }
  std::vector<CellPoint> out;
  for (const auto& [key, acc] : groups) {
    CellPoint p;
    p.kind = key.first;
    p.severity_index = key.second;
    p.n_cells = acc.cells;
    p.flip_probability = acc.flips.value() / static_cast<double>(acc.cells);
    if (labeled) {
      std::vector<double> per_rep;
      for (const auto& [rep, g] : acc.reps) {
        per_rep.push_back(balanced_accuracy(g.truths, g.preds, outcomes.n_classes));
      }
      p.balanced_accuracy = mean_of(per_rep);
    }
    out.push_back(std::move(p));
  }
  return out;
}

double accuracy_flip_correlation(std::span<const CellPoint> cells) {
  std::vector<double> acc;
  std::vector<double> fp;
  for (const auto& c : cells) {
    if (!c.balanced_accuracy) throw Error(ErrorCode::MissingLabels, "cell without balanced accuracy");
    acc.push_back(*c.balanced_accuracy);
    fp.push_back(c.flip_probability);
  }
  return pearson_r(acc, fp);
}

RobustnessSummary summarize_outcomes(std::string model_id, const LabeledOutcomes& outcomes) {
  RobustnessSummary s;
  s.model_id = std::move(model_id);
  s.n_samples = outcomes.samples.size();
  for (const auto& smp : outcomes.samples) s.n_corrupted_cells += smp.corrupted.size();
  const auto kinds = kinds_of(outcomes);
  s.cells = cell_series(outcomes);

  if (outcomes.labeled()) {
    std::vector<std::size_t> truths;
    std::vector<std::size_t> preds;
    for (const auto& smp : outcomes.samples) {
      truths.push_back(*smp.truth);
      preds.push_back(smp.clean_prediction);
    }
    s.balanced_accuracy_clean = balanced_accuracy(truths, preds, outcomes.n_classes);
    const auto table = error_table(outcomes);
    s.clean_error = table.clean_error;
    s.corruption_errors = table.per_corruption_error;
    try {
      s.pearson_r = accuracy_flip_correlation(s.cells);
    } catch (const Error& e) {
      s.advisories.push_back(std::string("pearson_r omitted: ") + e.what());
    }
  }

  if (!kinds.empty()) {
    s.flip_rate = dataset_flip_rate(outcomes);
    for (const auto& kind : kinds) s.flip_rate_per_kind[kind] = dataset_flip_rate(outcomes, kind);
  }
  return s;
}

RobustnessSummary summarize_outcomes(std::string model_id, const LabeledOutcomes& outcomes,
                                     std::string baseline_id, const LabeledOutcomes& baseline,
                                     const SummaryOptions& options) {
  RobustnessSummary s = summarize_outcomes(std::move(model_id), outcomes);
  s.baseline_model_id = std::move(baseline_id);
  const auto kinds = kinds_of(outcomes);
  if (kinds != kinds_of(baseline)) {
    throw Error(ErrorCode::IncompatibleBaseline, "model and baseline were evaluated on different kinds");
  }
  if (kinds.empty()) return s;

  if (outcomes.labeled() && baseline.labeled()) {
    const auto model_errors = error_table(outcomes);
    const auto base_errors = error_table(baseline);
    auto record = [&](const RatioResult& r, std::optional<double>& slot) {
      slot = r.value;
      s.advisories.insert(s.advisories.end(), r.advisories.begin(), r.advisories.end());
    };
    try {
      record(mce(model_errors, base_errors, kinds, options.mce_policy), s.mce);
    } catch (const Error& e) {
      s.advisories.push_back(std::string("mCE omitted: ") + e.what());
    }
    try {
      record(rce(model_errors, base_errors, kinds, options.rce_policy), s.rce);
    } catch (const Error& e) {
      s.advisories.push_back(std::string("rCE omitted: ") + e.what());
    }
  }

  const double base_fp = dataset_flip_rate(baseline);
  try {
    s.mfr = mfr(s.flip_rate, base_fp);
  } catch (const Error& e) {
    s.advisories.push_back(std::string("mFR omitted: ") + e.what());
  }
  for (const auto& kind : kinds) {
    const double b = dataset_flip_rate(baseline, kind);
    if (b > 0.0) s.mfr_per_kind[kind] = s.flip_rate_per_kind.at(kind) / b;
  }
  return s;
}

}  // namespace robustbench
