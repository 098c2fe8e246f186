// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "robustbench/corruption/corruption.hpp"
#include "robustbench/error.hpp"
#include "robustbench/harness/config.hpp"
#include "robustbench/harness/runner.hpp"
#include "robustbench/harness/store.hpp"
#include "robustbench/harness/summarize.hpp"
#include "robustbench/metrics/metrics.hpp"
#include "robustbench/planner/planner.hpp"
#include "robustbench/report/report.hpp"
#include "synthetic.hpp"

using namespace robustbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kMetricTolerance = 1e-12;
constexpr int kMetricInstances = 200;
constexpr double kMetricBudgetSeconds = 10.0;
constexpr int kFuzzImages = 1000;
constexpr double kFuzzBudgetSeconds = 60.0;
constexpr double kPipelineBudgetSeconds = 120.0;
constexpr int kShapesPerClass = 10;

const fs::path kFixtures = RB_FIXTURES_DIR;
const fs::path kProfiles = RB_PROFILES_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && first_failure_.empty()) first_failure_ = what;
    ok_ = ok_ && ok;
  }
  Outcome done(const std::string& detail) const {
    return {ok_, ok_ ? detail : first_failure_ + " (" + detail + ")"};
  }

 private:
  bool ok_ = true;
  std::string first_failure_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// Metric oracle

// Raw prediction tensor of one model: pred[sample][kind][sev][rep].
struct MicroModel {
  std::vector<std::size_t> clean;
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> pred;
};

struct MicroInstance {
  std::size_t n_classes = 0;
  std::vector<std::size_t> truth;
  std::vector<std::string> kinds;
  int n_sev = 0;
  int n_rep = 0;
  MicroModel model, baseline;
};

MicroInstance random_instance(Xoshiro256& rng) {
  static const std::vector<std::string> names{"Brightness", "Rain", "Shadow"};
  MicroInstance in;
  in.n_classes = 2 + rng.bounded(3);
  const std::size_t n = 1 + rng.bounded(5);
  const std::size_t k = 1 + rng.bounded(3);
  in.kinds.assign(names.begin(), names.begin() + static_cast<long>(k));
  in.n_sev = 1 + static_cast<int>(rng.bounded(3));
  in.n_rep = 1 + static_cast<int>(rng.bounded(2));
  for (std::size_t i = 0; i < n; ++i) in.truth.push_back(rng.bounded(in.n_classes));
  // Mostly-correct predictors so that both degenerate and regular cases occur.
  const auto draw = [&](std::size_t truth, double p_right) {
    return rng.uniform01() < p_right ? truth : rng.bounded(in.n_classes);
  };
  for (MicroModel* m : {&in.model, &in.baseline}) {
    const double p = rng.uniform(0.2, 0.9);
    for (std::size_t i = 0; i < n; ++i) {
      m->clean.push_back(draw(in.truth[i], p));
      m->pred.emplace_back();
      for (std::size_t c = 0; c < k; ++c) {
        m->pred[i].emplace_back();
        for (int s = 0; s < in.n_sev; ++s) {
          m->pred[i][c].emplace_back();
          for (int r = 0; r < in.n_rep; ++r) m->pred[i][c][s].push_back(draw(in.truth[i], p));
        }
      }
    }
  }
  return in;
}

LabeledOutcomes to_outcomes(const MicroInstance& in, const MicroModel& m) {
  LabeledOutcomes o{in.n_classes, {}};
  for (std::size_t i = 0; i < in.truth.size(); ++i) {
    SampleOutcome s{"s" + std::to_string(i), in.truth[i], m.clean[i], {}};
    for (std::size_t c = 0; c < in.kinds.size(); ++c)
      for (int sv = 0; sv < in.n_sev; ++sv)
        for (int r = 0; r < in.n_rep; ++r) s.corrupted[{in.kinds[c], sv, r}] = m.pred[i][c][sv][r];
    o.samples.push_back(std::move(s));
  }
  return o;
}

// Brute-force formulas, evaluated in long double straight from the tensor.
namespace oracle {

using LD = long double;

LD balanced_accuracy(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p, std::size_t n) {
  LD sum = 0;
  int present = 0;
  for (std::size_t c = 0; c < n; ++c) {
    int count = 0, hit = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] != c) continue;
      ++count;
      hit += p[i] == c;
    }
    if (count) {
      sum += static_cast<LD>(hit) / count;
      ++present;
    }
  }
  return sum / present;
}

LD clean_error(const MicroInstance& in, const MicroModel& m) {
  int wrong = 0;
  for (std::size_t i = 0; i < in.truth.size(); ++i) wrong += m.clean[i] != in.truth[i];
  return static_cast<LD>(wrong) / in.truth.size();
}

LD corruption_error(const MicroInstance& in, const MicroModel& m, std::size_t c) {
  LD total = 0;
  for (int s = 0; s < in.n_sev; ++s)
    for (int r = 0; r < in.n_rep; ++r) {
      int wrong = 0;
      for (std::size_t i = 0; i < in.truth.size(); ++i) wrong += m.pred[i][c][s][r] != in.truth[i];
      total += static_cast<LD>(wrong) / in.truth.size();
    }
  return total / (in.n_sev * in.n_rep);
}

LD sample_flip(const MicroInstance& in, const MicroModel& m, std::size_t i) {
  int flips = 0, cells = 0;
  for (std::size_t c = 0; c < in.kinds.size(); ++c)
    for (int s = 0; s < in.n_sev; ++s)
      for (int r = 0; r < in.n_rep; ++r) {
        ++cells;
        flips += m.pred[i][c][s][r] != m.clean[i];
      }
  return static_cast<LD>(flips) / cells;
}

LD dataset_flip(const MicroInstance& in, const MicroModel& m) {
  LD sum = 0;
  for (std::size_t i = 0; i < in.truth.size(); ++i) sum += sample_flip(in, m, i);
  return sum / in.truth.size();
}

int wrong_clean(const MicroInstance& in, const MicroModel& m) {
  int w = 0;
  for (std::size_t i = 0; i < in.truth.size(); ++i) w += m.clean[i] != in.truth[i];
  return w;
}

int wrong_cells(const MicroInstance& in, const MicroModel& m, std::size_t c) {
  int w = 0;
  for (std::size_t i = 0; i < in.truth.size(); ++i)
    for (const auto& sev : m.pred[i][c])
      for (std::size_t p : sev) w += p != in.truth[i];
  return w;
}

// Exact test of err(c) == clean error: W / (n C) == w / n  <=>  W == w C.
bool zero_delta(const MicroInstance& in, const MicroModel& m, std::size_t c) {
  return wrong_cells(in, m, c) == wrong_clean(in, m) * in.n_sev * in.n_rep;
}

// nullopt marks an undefined value (zero denominator or zero variance).
std::optional<LD> mce(const MicroInstance& in) {
  LD sum = 0;
  for (std::size_t c = 0; c < in.kinds.size(); ++c) {
    const LD b = corruption_error(in, in.baseline, c);
    if (b == 0) return std::nullopt;
    sum += corruption_error(in, in.model, c) / b;
  }
  return sum / in.kinds.size();
}

// Kinds whose baseline delta is zero are left out.
std::optional<LD> rce(const MicroInstance& in) {
  LD sum = 0;
  int used = 0;
  const LD fc = clean_error(in, in.model), bc = clean_error(in, in.baseline);
  for (std::size_t c = 0; c < in.kinds.size(); ++c) {
    if (zero_delta(in, in.baseline, c)) continue;
    const LD bd = corruption_error(in, in.baseline, c) - bc;
    sum += (corruption_error(in, in.model, c) - fc) / bd;
    ++used;
  }
  if (!used) return std::nullopt;
  return sum / used;
}

std::optional<LD> mfr(const MicroInstance& in) {
  const LD b = dataset_flip(in, in.baseline);
  if (b == 0) return std::nullopt;
  return dataset_flip(in, in.model) / b;
}

std::optional<LD> pearson(const MicroInstance& in, const MicroModel& m) {
  std::vector<LD> acc, fp;
  for (std::size_t c = 0; c < in.kinds.size(); ++c)
    for (int s = 0; s < in.n_sev; ++s) {
      LD a = 0, f = 0;
      for (int r = 0; r < in.n_rep; ++r) {
        std::vector<std::size_t> p;
        for (std::size_t i = 0; i < in.truth.size(); ++i) {
          p.push_back(m.pred[i][c][s][r]);
          f += m.pred[i][c][s][r] != m.clean[i];
        }
        a += balanced_accuracy(in.truth, p, in.n_classes);
      }
      acc.push_back(a / in.n_rep);
      fp.push_back(f / (in.n_rep * in.truth.size()));
    }
  const std::size_t n = acc.size();
  if (n < 2) return std::nullopt;
  LD ma = 0, mf = 0;
  for (std::size_t i = 0; i < n; ++i) ma += acc[i], mf += fp[i];
  ma /= n;
  mf /= n;
  LD sab = 0, saa = 0, sff = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (acc[i] - ma) * (fp[i] - mf);
    saa += (acc[i] - ma) * (acc[i] - ma);
    sff += (fp[i] - mf) * (fp[i] - mf);
  }
  if (saa == 0 || sff == 0) return std::nullopt;
  return sab / std::sqrt(saa * sff);
}

}  // namespace oracle

Outcome metric_oracle() {
  const auto t0 = Clock::now();
  Check check;
  Xoshiro256 rng(20240611);
  double worst = 0;
  int defined[4] = {0, 0, 0, 0};

  const auto compare = [&](const std::string& what, std::optional<oracle::LD> want,
                           const std::function<double()>& got) {
    std::optional<double> value;
    try {
      value = got();
    } catch (const Error&) {
    }
    check.require(want.has_value() == value.has_value(), what + ": definedness differs");
    if (want && value) {
      const double diff = std::abs(static_cast<double>(*want) - *value);
      worst = std::max(worst, diff);
      check.require(diff <= kMetricTolerance, what + ": |diff| " + fmt(diff));
    }
  };

  for (int t = 0; t < kMetricInstances; ++t) {
    const MicroInstance in = random_instance(rng);
    const LabeledOutcomes om = to_outcomes(in, in.model);
    const LabeledOutcomes ob = to_outcomes(in, in.baseline);
    const std::string tag = "instance " + std::to_string(t);

    compare(tag + " balanced accuracy", oracle::balanced_accuracy(in.truth, in.model.clean, in.n_classes),
            [&] { return balanced_accuracy(in.truth, in.model.clean, in.n_classes); });
    for (std::size_t c = 0; c < in.kinds.size(); ++c) {
      compare(tag + " err(" + in.kinds[c] + ")", oracle::corruption_error(in, in.model, c),
              [&] { return corruption_error(om, in.kinds[c]); });
    }
    for (std::size_t i = 0; i < in.truth.size(); ++i) {
      compare(tag + " FP", oracle::sample_flip(in, in.model, i),
              [&] { return flip_probability(om.samples[i]); });
    }
    const ErrorTable tm = error_table(om), tb = error_table(ob);
    const auto& kinds = in.kinds;
    const auto want_mce = oracle::mce(in);
    const auto want_rce = oracle::rce(in);
    const auto want_mfr = oracle::mfr(in);
    const auto want_r = oracle::pearson(in, in.model);
    defined[0] += want_mce.has_value();
    defined[1] += want_rce.has_value();
    defined[2] += want_mfr.has_value();
    defined[3] += want_r.has_value();
    compare(tag + " mCE", want_mce, [&] { return mce(tm, tb, kinds).value; });
    compare(tag + " rCE", want_rce, [&] { return rce(tm, tb, kinds).value; });
    compare(tag + " mFR", want_mfr, [&] { return mfr(dataset_flip_rate(om), dataset_flip_rate(ob)); });
    compare(tag + " pearson_r", want_r, [&] { return accuracy_flip_correlation(cell_series(om)); });
  }
  const double elapsed = seconds_since(t0);
  check.require(elapsed < kMetricBudgetSeconds, "runtime over budget");
  check.require(defined[0] > 0 && defined[1] > 0 && defined[2] > 0 && defined[3] > 0,
                "some metric was never defined");
  return check.done(std::to_string(kMetricInstances) + " instances, max |diff| " + fmt(worst) +
                    ", defined mCE/rCE/mFR/r " + std::to_string(defined[0]) + "/" + std::to_string(defined[1]) +
                    "/" + std::to_string(defined[2]) + "/" + std::to_string(defined[3]) + ", " + fmt(elapsed) +
                    " s");
}

// ---------------------------------------------------------------------------
// Toy pipeline helpers

// Forty shapes whose seeds are chosen so the toy model's clean prediction
// equals the drawn class; class names are then meaningful labels for it.
fs::path write_pseudo_labelled_shapes(const fs::path& root, std::uint64_t toy_seed) {
  const LabelSet labels(rbtest::shape_classes());
  BackendDescriptor d;
  d.model_id = "probe";
  d.type = "toy";
  d.seed = toy_seed;
  auto probe = make_classifier(d, labels);
  std::vector<std::pair<int, std::uint64_t>> items;
  std::uint64_t seed = 1;
  for (int cls = 0; cls < 4; ++cls) {
    int found = 0;
    while (found < kShapesPerClass) {
      const auto img = rbtest::shape_image(cls, seed, 32);
      if (probe->classify(img, {}).label == static_cast<std::size_t>(cls)) {
        items.emplace_back(cls, seed);
        ++found;
      }
      ++seed;
      if (seed > 200000) throw std::runtime_error("toy model never predicts class " + std::to_string(cls));
    }
  }
  rbtest::write_class_folder(root, items, 32);
  return root;
}

json toy_pipeline_config(const fs::path& dataset, const fs::path& out, std::uint64_t toy_seed) {
  return {{"dataset", dataset.string()},
          {"models",
           {{{"id", "toy"}, {"backend", "toy"}, {"seed", toy_seed}},
            {{"id", "degrading"},
             {"backend", "toy"},
             {"seed", toy_seed},
             {"degrade", {{"seed", 99}, {"strength", 1.0}, {"hold_clean", true}}}}}},
          {"kinds", {"GaussianNoise", "GaussianBlur", "SaltPepperNoise", "MotionBlur"}},
          {"severities", "all"},
          {"reps", 1},
          {"master_seed", 2024},
          {"workers", 2},
          {"output_dir", out.string()},
          {"run_id", "toy-pipeline"},
          {"baseline_model", "toy"}};
}

constexpr std::uint64_t kToySeed = 7;

struct SharedDataset {
  fs::path root;
  fs::path dataset;
};

const SharedDataset& shared_dataset() {
  static const SharedDataset d = [] {
    SharedDataset s;
    s.root = rbtest::temp_dir("acceptance");
    s.dataset = write_pseudo_labelled_shapes(s.root / "shapes", kToySeed);
    return s;
  }();
  return d;
}

// ---------------------------------------------------------------------------

Outcome self_baseline() {
  Check check;
  const auto& ds = shared_dataset();
  json j = toy_pipeline_config(ds.dataset, ds.root / "self", kToySeed);
  j["models"].push_back({{"id", "toy2"}, {"backend", "toy"}, {"seed", 31}});
  const RunResult r = run(parse_run_config(j, ds.root));
  const StoredRun stored = load_run(r.store_dir);
  const RunSummary s = summarize_run(stored, &stored);
  std::string shown;
  for (const auto& m : s.models) {
    check.require(m.mce.has_value() && *m.mce == 1.0, m.model_id + ": mCE != 1");
    check.require(m.rce.has_value() && *m.rce == 1.0, m.model_id + ": rCE != 1");
    check.require(m.mfr.has_value() && *m.mfr == 1.0, m.model_id + ": mFR != 1");
    shown += " " + m.model_id;
  }

  // Identity parameters for every kind that has them, on the image-driven
  // models; the degrading model ignores pixels by construction.
  json ident = toy_pipeline_config(ds.dataset, ds.root / "identity", kToySeed);
  ident["models"] = {j["models"][0], j["models"][2]};
  ident.erase("baseline_model");
  ident["kinds"] = json::array();
  ident["levels"] = json::object();
  for (const auto& e : catalog()) {
    const auto p = rbtest::identity_params(e.kind);
    if (!p) continue;
    ident["kinds"].push_back(std::string(e.name));
    ident["levels"][std::string(e.name)] = json::array({json(*p)});
  }
  const RunResult ri = run(parse_run_config(ident, ds.root));
  const RunSummary si = summarize_run(load_run(ri.store_dir), nullptr);
  for (const auto& m : si.models) {
    check.require(m.flip_rate == 0.0, m.model_id + ": identity FP " + fmt(m.flip_rate));
  }
  return check.done("models" + shown + " exact ones; " + std::to_string(ident["kinds"].size()) +
                    " identity kinds, FP 0 for " + std::to_string(si.models.size()) + " models");
}

// ---------------------------------------------------------------------------

Outcome corruption_fuzz() {
  const auto t0 = Clock::now();
  Check check;
  Xoshiro256 rng(777);
  std::size_t applications = 0;
  for (int n = 0; n < kFuzzImages; ++n) {
    const int w = 1 + static_cast<int>(rng.bounded(24));
    const int h = 1 + static_cast<int>(rng.bounded(24));
    const RasterImage img = rbtest::random_image(rng, w, h);
    const std::uint64_t seed = rng.next();
    const std::string tag = "image " + std::to_string(n) + " ";
    for (const auto& e : catalog()) {
      const auto& grid = severity_grid(e.kind);
      const int sev = static_cast<int>(rng.bounded(grid.size()));
      const CorruptionInstance inst{e.kind, sev, grid.levels[static_cast<std::size_t>(sev)], seed};
      const RasterImage a = apply(img, inst);
      const RasterImage b = apply(img, inst);
      applications += 2;
      check.require(a.width() == w && a.height() == h, tag + std::string(e.name) + " changed dimensions");
      check.require(a == b, tag + std::string(e.name) + " not deterministic");
      if (const auto p = rbtest::identity_params(e.kind)) {
        check.require(apply(img, e.kind, *p, seed) == img, tag + std::string(e.name) + " identity changed pixels");
        ++applications;
      }
    }
    for (auto k : {CorruptionKind::ImageFlipHorizontal, CorruptionKind::ImageFlipVertical}) {
      check.require(apply(apply(img, k, {}, seed), k, {}, seed) == img, tag + "flip is not an involution");
      applications += 2;
    }
    // Saturating arithmetic: scaled and shifted values clamp to [0, 255].
    const double factor = rng.uniform(0.0, 10.0);
    const RasterImage bright = apply(img, CorruptionKind::Brightness, {{"factor", factor}}, seed);
    const double shift = static_cast<double>(rng.bounded(511)) - 255.0;
    const RasterImage shifted =
        apply(img, CorruptionKind::GlobalColourShift, {{"shift_r", shift}, {"shift_g", -shift}, {"shift_b", 0.0}}, seed);
    applications += 2;
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double want = std::clamp(std::round(px[i] * factor), 0.0, 255.0);
      check.require(bright.pixels()[i] == static_cast<std::uint8_t>(want), tag + "brightness clamp");
      const double s = i % 3 == 0 ? shift : (i % 3 == 1 ? -shift : 0.0);
      check.require(shifted.pixels()[i] == static_cast<std::uint8_t>(std::clamp(px[i] + s, 0.0, 255.0)),
                    tag + "colour shift clamp");
    }
  }
  const double elapsed = seconds_since(t0);
  check.require(elapsed < kFuzzBudgetSeconds, "runtime over budget");
  return check.done(std::to_string(kFuzzImages) + " images, " + std::to_string(applications) + " applications, " +
                    fmt(elapsed) + " s");
}

// ---------------------------------------------------------------------------

Outcome toy_pipeline() {
  const auto t0 = Clock::now();
  Check check;
  const auto& ds = shared_dataset();
  const RunConfig config = parse_run_config(toy_pipeline_config(ds.dataset, ds.root / "e2e", kToySeed), ds.root);
  const RunResult r = run(config);
  check.require(r.complete, "run incomplete");
  const StoredRun stored = load_run(r.store_dir);
  SummarizeOptions opts;
  opts.baseline_model = "toy";
  const RunSummary s = summarize_run(stored, &stored, opts);

  const RobustnessSummary* deg = nullptr;
  for (const auto& m : s.models)
    if (m.model_id == "degrading") deg = &m;
  check.require(deg != nullptr, "degrading model missing");
  if (!deg) return check.done("no summary");
  check.require(deg->mce.has_value(), "mCE undefined");
  check.require(deg->mce && *deg->mce > 1.0, "mCE not above 1");
  check.require(deg->pearson_r.has_value() && *deg->pearson_r < 0.0, "pearson_r not negative");

  std::string curve_text;
  for (const auto& [kind, n] : s.levels_per_kind) {
    for (const auto& series : curve_series(s, kind, CurveMetric::BalancedAccuracy)) {
      if (series.model_id != "degrading") continue;
      for (std::size_t i = 1; i < series.points.size(); ++i) {
        check.require(series.points[i].value <= series.points[i - 1].value, kind + " curve increases");
      }
      curve_text += " " + kind + " " + fmt(series.points.front().value) + "->" + fmt(series.points.back().value);
    }
  }
  const auto out = write_run_report(s, table_rows(s), {"shapes", std::string("toy"), true}, ds.root / "e2e-report");
  check.require(fs::exists(ds.root / "e2e-report" / "summary.csv"), "report not written");

  const double elapsed = seconds_since(t0);
  check.require(elapsed < kPipelineBudgetSeconds, "runtime over budget");
  return check.done("mCE " + (deg->mce ? fmt(*deg->mce) : std::string("n/a")) + ", r " +
                    (deg->pearson_r ? fmt(*deg->pearson_r) : std::string("n/a")) + ", curves" + curve_text + ", " +
                    fmt(elapsed) + " s");
}

// ---------------------------------------------------------------------------

Outcome planner_replay() {
  Check check;
  std::ifstream in(kFixtures / "expected_matrix.json");
  const json expected = json::parse(in);
  TranscriptReplayClient client(kFixtures / "transcripts");
  DomainRuns all;
  std::map<std::string, PlanResult> plans;
  for (const auto& entry : fs::directory_iterator(kProfiles)) {
    const DomainProfile p = load_profile(entry.path());
    PlanResult r = select_plan(p, client);
    all.emplace_back(p.domain_id, r.runs);
    plans.emplace(p.domain_id, std::move(r));
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  const SelectionHeatmap h = selection_heatmap(all);
  int cells = 0;
  const auto& names = expected.at("kinds");
  for (const auto& [domain, counts] : expected.at("counts").items()) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      const int got = h.at(domain, kind_from_name(names[k].get<std::string>()));
      check.require(got == counts[k].get<int>(), domain + "/" + names[k].get<std::string>() + " count");
      ++cells;
    }
  }
  check.require(h.domains.size() == expected.at("counts").size(), "domain count");

  const auto& driving = plans.at("driving");
  check.require(h.at("driving", CorruptionKind::Rain) == 6 && driving.plan.contains(CorruptionKind::Rain),
                "6/10 not chosen");
  check.require(h.at("driving", CorruptionKind::Shadow) == 5 && !driving.plan.contains(CorruptionKind::Shadow),
                "5/10 chosen");

  const auto has = [](const std::vector<Violation>& v, ViolationType t, CorruptionKind k) {
    return std::find(v.begin(), v.end(), Violation{t, k}) != v.end();
  };
  const auto medical = validate_plan(plans.at("medical").plan, default_rules());
  check.require(has(medical, ViolationType::ForbiddenBlacklisted, CorruptionKind::Rain),
                "Rain in medical not flagged");

  TranscriptReplayClient alt(kFixtures / "transcripts_alt");
  const PlanResult sat = select_plan(load_profile(kProfiles / "satellite.json"), alt);
  const auto sv = validate_plan(sat.plan, default_rules());
  check.require(!sat.plan.contains(CorruptionKind::CloudGenerator), "alternate satellite kept CloudGenerator");
  check.require(has(sv, ViolationType::MissingWhitelisted, CorruptionKind::CloudGenerator),
                "missing CloudGenerator in satellite not flagged");
  const auto sat_main = validate_plan(plans.at("satellite").plan, default_rules());
  check.require(!has(sat_main, ViolationType::MissingWhitelisted, CorruptionKind::CloudGenerator),
                "CloudGenerator flagged although chosen");
  return check.done(std::to_string(cells) + " matrix cells, boundaries 5/10 and 6/10, " +
                    std::to_string(medical.size()) + " medical and " + std::to_string(sv.size()) +
                    " alternate satellite violations");
}

// ---------------------------------------------------------------------------

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) n += !l.empty();
  return n;
}

Outcome determinism_and_resume() {
  Check check;
  const auto& ds = shared_dataset();
  const auto config_in = [&](const std::string& name) {
    return parse_run_config(toy_pipeline_config(ds.dataset, ds.root / name, kToySeed), ds.root);
  };
  const RunResult a = run(config_in("det-a"));
  const RunResult b = run(config_in("det-b"));
  const std::string reference = canonical_store(a.store_dir);
  check.require(reference == canonical_store(b.store_dir), "two identical runs differ");

  // Orderly stop at half the units, then resume.
  RunOptions half;
  half.max_new_records = a.expected_units / 2;
  const RunResult stopped = run(config_in("det-stop"), half);
  check.require(!stopped.complete, "stopped run claims completion");
  const RunResult resumed = resume(stopped.store_dir);
  check.require(resumed.complete && resumed.new_records == a.expected_units - half.max_new_records.value(),
                "resume did not finish the remaining units");
  check.require(canonical_store(stopped.store_dir) == reference, "stop-and-resume differs");

  // Hard kill of a child process mid-run.
  const RunConfig killed_config = config_in("det-kill");
  const fs::path killed_dir = store_dir_of(killed_config);
  std::cout.flush();
  const pid_t child = ::fork();
  if (child == 0) {
    try {
      run(killed_config);
    } catch (...) {
      ::_exit(3);
    }
    ::_exit(0);
  }
  std::size_t at_kill = 0;
  const auto deadline = Clock::now() + std::chrono::seconds(60);
  while (Clock::now() < deadline) {
    at_kill = line_count(killed_dir / "journal.jsonl");
    if (at_kill >= a.expected_units / 2) break;
    std::this_thread::sleep_for(std::chrono::microseconds(200));
  }
  ::kill(child, SIGKILL);
  int status = 0;
  ::waitpid(child, &status, 0);
  const bool killed = WIFSIGNALED(status);
  check.require(killed, "child finished before the kill");
  const RunResult after = resume(killed_dir);
  check.require(after.complete, "resume after kill incomplete");
  check.require(canonical_store(killed_dir) == reference, "kill-and-resume differs");
  return check.done(std::to_string(a.expected_units) + " units; stopped at " +
                    std::to_string(stopped.new_records) + ", killed at ~" + std::to_string(at_kill) +
                    " journal lines, resumed " + std::to_string(after.new_records));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric-oracle", metric_oracle},
      {"self-baseline-identities", self_baseline},
      {"corruption-invariants", corruption_fuzz},
      {"toy-pipeline", toy_pipeline},
      {"planner-replay", planner_replay},
      {"determinism-resume", determinism_and_resume},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures ? 1 : 0;
}
