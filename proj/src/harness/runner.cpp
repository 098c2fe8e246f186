#include "robustbench/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "robustbench/corruption/corruption.hpp"
#include "robustbench/error.hpp"
#include "robustbench/harness/store.hpp"
#include "robustbench/image_io.hpp"

namespace robustbench {

namespace fs = std::filesystem;

namespace {

struct CellWork {
  const KindSchedule* schedule;
  int severity_index;
  int rep;
  std::vector<std::size_t> models;  // indices of models missing this cell
};

struct SampleWork {
  std::size_t entry;
  std::vector<std::size_t> clean_missing;
  std::vector<std::optional<std::size_t>> stored_clean;  // per model
  std::vector<CellWork> cells;
};

struct Output {
  std::optional<EvalRecord> record;
  UnitKey skipped_key;
  std::string error;
};

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  return s;
}

class Execution {
 public:
  Execution(const RunConfig& config, const fs::path& dir, const RunOptions& options)
      : config_(config), dir_(dir), options_(options) {}

  RunResult go() {
    manifest_ = load_manifest(config_.dataset, options_.manifest);
    const std::vector<std::string> labels = resolve_labels();
    const LabelSet label_set(labels, config_.label_template);

    StoreHeader header;
    header.run_id = config_.run_id;
    header.config_hash = config_hash(config_);
    header.dataset_hash = dataset_hash(manifest_);
    header.config = run_config_to_json(config_);
    header.labels = labels;
    header.supervised = manifest_.supervised();
    header.n_samples = manifest_.entries.size();
    header.expected_units =
        manifest_.entries.size() * config_.models.size() * (1 + config_.cells_per_sample());
    header.created_at = utc_timestamp();

    for (const auto& e : manifest_.entries) {
      std::optional<std::size_t> t;
      if (e.class_name) {
        const auto it = std::find(labels.begin(), labels.end(), *e.class_name);
        if (it == labels.end()) {
          throw Error(ErrorCode::InvalidConfig, "class '" + *e.class_name + "' is not in the label list");
        }
        t = static_cast<std::size_t>(it - labels.begin());
      }
      truth_.push_back(t);
    }

    store_ = std::make_unique<RunStore>(dir_, header);
    for (const auto& m : config_.models) classifiers_.push_back(make_classifier(m, label_set));
    model_locks_ = std::vector<std::mutex>(classifiers_.size());

    plan_work();

    const int n_workers = std::max(1, std::min<int>(config_.workers, static_cast<int>(work_.size())));
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < n_workers; ++w) pool.emplace_back([this] { worker(); });
    }
    if (failure_) std::rethrow_exception(failure_);

    RunResult r;
    r.run_id = config_.run_id;
    r.store_dir = dir_;
    r.new_records = new_records_;
    r.new_skipped = new_skipped_;
    r.total_records = store_->n_records();
    r.expected_units = header.expected_units;
    r.complete = store_->completed().size() == header.expected_units;
    return r;
  }

 private:
  std::vector<std::string> resolve_labels() const {
    if (!config_.labels) {
      if (manifest_.class_names.empty()) {
        throw Error(ErrorCode::InvalidConfig, "unlabeled dataset: the config must list 'labels'");
      }
      return manifest_.class_names;
    }
    return *config_.labels;
  }

  void plan_work() {
    const auto& done = store_->completed();
    for (std::size_t i = 0; i < manifest_.entries.size(); ++i) {
      const std::string& id = manifest_.entries[i].sample_id;
      SampleWork s{i, {}, {}, {}};
      for (std::size_t m = 0; m < classifiers_.size(); ++m) {
        const std::string& mid = config_.models[m].model_id;
        if (!done.count(UnitKey{mid, id, "", -1, -1})) s.clean_missing.push_back(m);
        s.stored_clean.push_back(store_->clean_prediction(mid, id));
      }
      for (const auto& sched : config_.schedule) {
        const std::string kind(name_of(sched.kind));
        for (int sev : sched.severities) {
          for (int rep = 0; rep < config_.reps; ++rep) {
            CellWork c{&sched, sev, rep, {}};
            for (std::size_t m = 0; m < classifiers_.size(); ++m) {
              if (!done.count(UnitKey{config_.models[m].model_id, id, kind, sev, rep})) c.models.push_back(m);
            }
            if (!c.models.empty()) s.cells.push_back(std::move(c));
          }
        }
      }
      if (!s.clean_missing.empty() || !s.cells.empty()) work_.push_back(std::move(s));
    }
  }

  std::size_t classify(std::size_t m, const RasterImage& img, const CellContext& ctx) {
    Classifier& c = *classifiers_[m];
    if (c.reentrant()) return c.classify(img, ctx).label;
    std::lock_guard lock(model_locks_[m]);
    return c.classify(img, ctx).label;
  }

  std::vector<Output> process(const SampleWork& w) {
    const ManifestEntry& entry = manifest_.entries[w.entry];
    const RasterImage image = read_image(manifest_.path_of(entry));
    std::vector<Output> out;

    std::vector<std::size_t> clean(classifiers_.size(), 0);
    for (std::size_t m = 0; m < classifiers_.size(); ++m) {
      const bool missing = std::find(w.clean_missing.begin(), w.clean_missing.end(), m) != w.clean_missing.end();
      if (!missing && w.stored_clean[m]) {
        clean[m] = *w.stored_clean[m];
        continue;
      }
      CellContext ctx{entry.sample_id, true, "", 0, 1, 0, std::nullopt};
      clean[m] = classify(m, image, ctx);
      if (missing) {
        EvalRecord r;
        r.run_id = config_.run_id;
        r.key = UnitKey{config_.models[m].model_id, entry.sample_id, "", -1, -1};
        r.clean_prediction = clean[m];
        r.truth = truth_[w.entry];
        r.timestamp = utc_timestamp();
        out.push_back({std::move(r), {}, {}});
      }
    }

    for (const auto& cell : w.cells) {
      const std::string kind(name_of(cell.schedule->kind));
      const std::uint64_t seed = cell_seed(config_.master_seed, entry.sample_id, kind, cell.severity_index, cell.rep);
      std::optional<RasterImage> corrupted;
      std::string error;
      try {
        corrupted = apply(image, cell.schedule->kind,
                          cell.schedule->levels[static_cast<std::size_t>(cell.severity_index)], seed);
      } catch (const Error& e) {
        error = std::string(to_string(ErrorCode::CorruptionError)) + ": " + e.what();
      }
      if (corrupted && config_.keep_images) save_image(entry.sample_id, kind, cell, *corrupted);
      for (std::size_t m : cell.models) {
        UnitKey key{config_.models[m].model_id, entry.sample_id, kind, cell.severity_index, cell.rep};
        if (!corrupted) {
          out.push_back({std::nullopt, std::move(key), error});
          continue;
        }
        CellContext ctx{entry.sample_id, false, kind, cell.severity_index,
                        static_cast<int>(cell.schedule->levels.size()), cell.rep, clean[m]};
        EvalRecord r;
        r.run_id = config_.run_id;
        r.key = std::move(key);
        r.seed = seed;
        r.clean_prediction = clean[m];
        r.prediction = classify(m, *corrupted, ctx);
        r.truth = truth_[w.entry];
        r.timestamp = utc_timestamp();
        out.push_back({std::move(r), {}, {}});
      }
    }
    return out;
  }

  void save_image(const std::string& sample_id, const std::string& kind, const CellWork& cell,
                  const RasterImage& img) {
    const fs::path d = dir_ / "images" / file_safe(sample_id);
    fs::create_directories(d);
    write_image(d / (kind + "_s" + std::to_string(cell.severity_index) + "_r" + std::to_string(cell.rep) + ".png"),
                img);
  }

  // Commits finished samples in work-list order so the file layout does not
  // depend on scheduling.
  void deliver(std::size_t index, std::vector<Output> outputs) {
    std::lock_guard lock(write_mutex_);
    pending_.emplace(index, std::move(outputs));
    while (!stop_ && !pending_.empty() && pending_.begin()->first == next_commit_) {
      for (const auto& o : pending_.begin()->second) {
        if (options_.max_new_records && new_records_ >= *options_.max_new_records) {
          stop_ = true;
          break;
        }
        if (o.record) {
          store_->append(*o.record);
          ++new_records_;
        } else {
          store_->append_skipped(o.skipped_key, o.error);
          ++new_skipped_;
        }
      }
      pending_.erase(pending_.begin());
      ++next_commit_;
    }
  }

  void worker() {
    for (std::size_t i = next_claim_++; i < work_.size() && !stop_; i = next_claim_++) {
      try {
        deliver(i, process(work_[i]));
      } catch (...) {
        std::lock_guard lock(write_mutex_);
        if (!failure_) failure_ = std::current_exception();
        stop_ = true;
      }
    }
  }

  const RunConfig& config_;
  fs::path dir_;
  RunOptions options_;
  DatasetManifest manifest_;
  std::vector<std::optional<std::size_t>> truth_;
  std::unique_ptr<RunStore> store_;
  std::vector<std::unique_ptr<Classifier>> classifiers_;
  std::vector<std::mutex> model_locks_;
  std::vector<SampleWork> work_;

  std::atomic<std::size_t> next_claim_{0};
  std::atomic<bool> stop_{false};
  std::mutex write_mutex_;
  std::map<std::size_t, std::vector<Output>> pending_;
  std::size_t next_commit_ = 0;
  std::size_t new_records_ = 0;
  std::size_t new_skipped_ = 0;
  std::exception_ptr failure_;
};

}  // namespace

fs::path store_dir_of(const RunConfig& config) { return config.output_dir / config.run_id; }

RunResult run(const RunConfig& config, const RunOptions& options) {
  return Execution(config, store_dir_of(config), options).go();
}

RunResult resume(const fs::path& store_dir, const std::optional<RunConfig>& config, const RunOptions& options) {
  const StoreHeader header = read_store(store_dir).header;
  RunConfig stored = parse_run_config(header.config, store_dir);
  if (config_hash(stored) != header.config_hash) {
    throw Error(ErrorCode::StoreCorrupt, store_dir.string() + ": stored config does not match its hash");
  }
  if (config && config_hash(*config) != header.config_hash) {
    throw Error(ErrorCode::StoreCorrupt, store_dir.string() + ": config hash differs from the stored run");
  }
  if (config) stored.workers = config->workers;
  return Execution(stored, store_dir, options).go();
}

}  // namespace robustbench
