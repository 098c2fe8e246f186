#include "robustbench/harness/summarize.hpp"

#include <algorithm>

#include "robustbench/error.hpp"

namespace robustbench {

using nlohmann::json;

std::vector<std::string> StoredRun::model_ids() const {
  std::vector<std::string> ids;
  for (const auto& m : header.config.at("models")) ids.push_back(m.at("id").get<std::string>());
  return ids;
}

bool StoredRun::complete() const noexcept {
  return records.size() + skipped.size() == header.expected_units;
}

LabeledOutcomes StoredRun::outcomes(const std::string& model_id) const {
  LabeledOutcomes out;
  out.n_classes = header.labels.size();
  std::map<std::string, SampleOutcome> by_sample;
  for (const auto& r : records) {
    if (r.key.model_id != model_id) continue;
    SampleOutcome& s = by_sample[r.key.sample_id];
    s.sample_id = r.key.sample_id;
    if (r.key.clean()) {
      s.clean_prediction = r.clean_prediction;
      s.truth = r.truth;
    } else {
      s.corrupted[CellKey{r.key.kind, r.key.severity_index, r.key.rep}] = *r.prediction;
    }
  }
  for (auto& [id, s] : by_sample) out.samples.push_back(std::move(s));
  return out;
}

StoredRun load_run(const std::filesystem::path& dir) {
  StoreContents c = read_store(dir);
  StoredRun r{dir, std::move(c.header), std::move(c.records), {}};
  for (auto& e : c.journal)
    if (e.skipped) r.skipped.push_back(std::move(e));
  return r;
}

namespace {

json plan_signature(const StoreHeader& h) {
  return {{"kinds", h.config.at("kinds")},
          {"levels", h.config.at("levels")},
          {"severities", h.config.at("severities")}};
}

std::string pick_baseline(const std::string& model_id, const StoredRun& baseline,
                          const SummarizeOptions& options) {
  const auto ids = baseline.model_ids();
  auto has = [&](const std::string& id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };
  if (options.baseline_model) {
    if (!has(*options.baseline_model)) {
      throw Error(ErrorCode::IncompatibleBaseline,
                  "baseline run has no model '" + *options.baseline_model + "'");
    }
    return *options.baseline_model;
  }
  if (has(model_id)) return model_id;
  if (ids.size() == 1) return ids.front();
  throw Error(ErrorCode::IncompatibleBaseline,
              "cannot pair model '" + model_id + "' with a baseline model; name one explicitly");
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunSummary summarize_run(const StoredRun& run, const StoredRun* baseline, const SummarizeOptions& options) {
  auto require_complete = [](const StoredRun& r) {
    if (!r.complete()) {
      throw Error(ErrorCode::IncompleteRun,
                  r.header.run_id + ": " + std::to_string(r.records.size() + r.skipped.size()) + " of " +
                      std::to_string(r.header.expected_units) + " units done; resume it first");
    }
  };
  require_complete(run);
  if (baseline) {
    require_complete(*baseline);
    if (baseline->header.dataset_hash != run.header.dataset_hash) {
      throw Error(ErrorCode::IncompatibleBaseline, "baseline run used a different dataset");
    }
    if (plan_signature(baseline->header) != plan_signature(run.header)) {
      throw Error(ErrorCode::IncompatibleBaseline, "baseline run used a different corruption plan");
    }
  }

  RunSummary s;
  s.run_id = run.header.run_id;
  if (baseline) s.baseline_run_id = baseline->header.run_id;
  s.labels = run.header.labels;
  s.supervised = run.header.supervised;
  s.reps = run.header.config.value("reps", 1);
  for (const auto& [kind, sev] : run.header.config.at("severities").items()) s.levels_per_kind[kind] = sev.size();

  for (const auto& id : run.model_ids()) {
    const LabeledOutcomes outcomes = run.outcomes(id);
    if (!baseline) {
      s.models.push_back(summarize_outcomes(id, outcomes));
      continue;
    }
    const std::string bid = pick_baseline(id, *baseline, options);
    s.models.push_back(summarize_outcomes(id, outcomes, bid, baseline->outcomes(bid), options.metrics));
  }
  for (const auto& e : run.skipped) {
    s.skipped.push_back({e.key.model_id, e.key.sample_id, e.key.kind, e.key.severity_index, e.key.rep, e.error});
  }
  return s;
}

json summary_to_json(const RunSummary& s) {
  json models = json::array();
  for (const auto& m : s.models) {
    json cells = json::array();
    for (const auto& c : m.cells) {
      cells.push_back({{"kind", c.kind},
                       {"severity_index", c.severity_index},
                       {"balanced_accuracy", opt(c.balanced_accuracy)},
                       {"flip_probability", c.flip_probability},
                       {"n_cells", c.n_cells}});
    }
    models.push_back({{"model_id", m.model_id},
                      {"n_samples", m.n_samples},
                      {"n_corrupted_cells", m.n_corrupted_cells},
                      {"balanced_accuracy_clean", opt(m.balanced_accuracy_clean)},
                      {"clean_error", opt(m.clean_error)},
                      {"corruption_errors", json(m.corruption_errors)},
                      {"flip_rate", m.flip_rate},
                      {"flip_rate_per_kind", json(m.flip_rate_per_kind)},
                      {"baseline_model_id", m.baseline_model_id ? json(*m.baseline_model_id) : json(nullptr)},
                      {"mce", opt(m.mce)},
                      {"rce", opt(m.rce)},
                      {"mfr", opt(m.mfr)},
                      {"mfr_per_kind", json(m.mfr_per_kind)},
                      {"pearson_r", opt(m.pearson_r)},
                      {"cells", cells},
                      {"advisories", m.advisories}});
  }
  json skipped = json::array();
  for (const auto& k : s.skipped) {
    skipped.push_back({{"model_id", k.model_id},
                       {"sample_id", k.sample_id},
                       {"kind", k.kind},
                       {"severity_index", k.severity_index},
                       {"rep", k.rep},
                       {"error", k.error}});
  }
  return {{"run_id", s.run_id},
          {"baseline_run_id", s.baseline_run_id ? json(*s.baseline_run_id) : json(nullptr)},
          {"labels", s.labels},
          {"supervised", s.supervised},
          {"reps", s.reps},
          {"levels_per_kind", json(s.levels_per_kind)},
          {"vote_rule", "strict majority"},
          {"models", models},
          {"skipped", skipped}};
}

}  // namespace robustbench
