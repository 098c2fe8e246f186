#include "robustbench/harness/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "robustbench/corruption/corruption.hpp"
#include "robustbench/error.hpp"
#include "robustbench/hash.hpp"
#include "robustbench/planner/planner.hpp"
#include "robustbench/rng.hpp"

namespace robustbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return fs::absolute(path.is_absolute() ? path : base / path).lexically_normal();
}

BackendDescriptor parse_model(const json& j, const fs::path& base) {
  BackendDescriptor d;
  d.model_id = j.at("id").get<std::string>();
  d.type = j.at("backend").get<std::string>();
  if (d.model_id.empty()) invalid("model id must not be empty");
  if (d.type == "toy") {
    d.seed = j.value("seed", std::uint64_t{0});
    d.dim = j.value("dim", std::size_t{32});
  } else if (d.type == "embed_file") {
    d.embeddings = resolve(base, j.at("embeddings").get<std::string>());
    if (!fs::is_regular_file(d.embeddings)) invalid("embeddings file not found: " + d.embeddings.string());
  } else if (d.type == "http_service") {
    d.url = j.value("url", std::string());
    d.model = j.value("model", std::string());
    d.max_in_flight = j.value("max_in_flight", 4);
    if (d.max_in_flight < 1) invalid("max_in_flight must be >= 1");
  } else {
    invalid("model '" + d.model_id + "': unknown backend '" + d.type + "'");
  }
  if (j.contains("degrade")) {
    const auto& g = j.at("degrade");
    d.degrade = DegradeSpec{g.value("seed", std::uint64_t{0}), g.value("strength", 1.0),
                           g.value("hold_clean", false)};
    if (!(d.degrade->strength >= 0.0 && d.degrade->strength <= 1.0)) invalid("degrade strength must lie in [0, 1]");
  }
  return d;
}

json model_to_json(const BackendDescriptor& d, bool with_endpoint) {
  json j{{"id", d.model_id}, {"backend", d.type}};
  if (d.type == "toy") {
    j["seed"] = d.seed;
    j["dim"] = d.dim;
  } else if (d.type == "embed_file") {
    j["embeddings"] = d.embeddings.generic_string();
  } else {
    j["model"] = d.model;
    if (with_endpoint) {
      j["url"] = d.url;
      j["max_in_flight"] = d.max_in_flight;
    }
  }
  if (d.degrade) {
    j["degrade"] = {{"seed", d.degrade->seed},
                    {"strength", d.degrade->strength},
                    {"hold_clean", d.degrade->hold_clean}};
  }
  return j;
}

ParamMap parse_level(CorruptionKind kind, const json& j) {
  ParamMap p;
  for (const auto& [k, v] : j.items()) p[k] = v.get<double>();
  try {
    validate_params(kind, p);
  } catch (const Error& e) {
    invalid(std::string("level for ") + std::string(name_of(kind)) + ": " + e.what());
  }
  return p;
}

std::vector<CorruptionKind> parse_kinds(const json& j, const fs::path& base, std::optional<fs::path>& plan) {
  std::vector<CorruptionKind> kinds;
  if (j.contains("kinds")) {
    for (const auto& k : j.at("kinds")) {
      try {
        kinds.push_back(kind_from_name(k.get<std::string>()));
      } catch (const Error& e) {
        invalid(e.what());
      }
    }
    if (j.contains("plan_source")) plan = fs::path(j.at("plan_source").get<std::string>());
  } else if (j.contains("plan")) {
    plan = resolve(base, j.at("plan").get<std::string>());
    kinds = load_plan(*plan).plan.kinds();
  } else {
    invalid("config needs 'kinds' or 'plan'");
  }
  if (kinds.empty()) invalid("no corruption kinds scheduled");
  std::set<CorruptionKind> seen;
  for (auto k : kinds)
    if (!seen.insert(k).second) invalid("kind listed twice: " + std::string(name_of(k)));
  return kinds;
}

std::vector<int> all_indices(std::size_t n) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
  return v;
}

std::vector<int> checked_indices(const json& j, std::size_t n_levels, std::string_view kind, bool drop_excess) {
  std::set<int> out;
  for (const auto& v : j) {
    const int i = v.get<int>();
    if (i < 0 || static_cast<std::size_t>(i) >= n_levels) {
      if (drop_excess && i >= 0) continue;
      invalid("severity " + std::to_string(i) + " outside grid of " + std::string(kind));
    }
    out.insert(i);
  }
  if (out.empty()) invalid("no severities scheduled for " + std::string(kind));
  return {out.begin(), out.end()};
}

}  // namespace

std::size_t RunConfig::cells_per_sample() const noexcept {
  std::size_t n = 0;
  for (const auto& s : schedule) n += s.severities.size();
  return n * static_cast<std::size_t>(reps);
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    c.dataset = resolve(base_dir, j.at("dataset").get<std::string>());
    if (!fs::exists(c.dataset)) invalid("dataset not found: " + c.dataset.string());
    for (const auto& m : j.at("models")) c.models.push_back(parse_model(m, base_dir));
    if (c.models.empty()) invalid("no models configured");
    std::set<std::string> ids;
    for (const auto& m : c.models)
      if (!ids.insert(m.model_id).second) invalid("duplicate model id '" + m.model_id + "'");

    c.label_template = j.value("label_template", c.label_template);
    if (j.contains("labels")) c.labels = j.at("labels").get<std::vector<std::string>>();

    const auto kinds = parse_kinds(j, base_dir, c.plan);
    const json levels = j.value("levels", json::object());
    const json sev = j.value("severities", json("all"));
    for (auto kind : kinds) {
      const std::string name(name_of(kind));
      KindSchedule s{kind, {}, {}};
      if (levels.contains(name)) {
        for (const auto& l : levels.at(name)) s.levels.push_back(parse_level(kind, l));
        if (s.levels.empty()) invalid("empty level list for " + name);
      } else {
        s.levels = severity_grid(kind).levels;
      }
      if (sev.is_string()) {
        if (sev.get<std::string>() != "all") invalid("severities must be \"all\", a list or a map");
        s.severities = all_indices(s.levels.size());
      } else if (sev.is_array()) {
        s.severities = checked_indices(sev, s.levels.size(), name, true);
      } else if (sev.is_object()) {
        s.severities = sev.contains(name) ? checked_indices(sev.at(name), s.levels.size(), name, false)
                                          : all_indices(s.levels.size());
      } else {
        invalid("severities must be \"all\", a list or a map");
      }
      c.schedule.push_back(std::move(s));
    }

    c.reps = j.value("reps", 1);
    if (c.reps < 1) invalid("reps must be >= 1");
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("runs")));
    c.workers = j.value("workers", 1);
    if (c.workers < 1) invalid("workers must be >= 1");
    c.keep_images = j.value("keep_images", false);
    if (j.contains("baseline_run")) c.baseline_run = j.at("baseline_run").get<std::string>();
    if (j.contains("baseline_model")) c.baseline_model = j.at("baseline_model").get<std::string>();
    c.run_id = j.value("run_id", std::string());
    if (c.run_id.empty()) c.run_id = "run-" + config_hash(c).substr(0, 12);
    if (c.run_id.find_first_of("/\\") != std::string::npos || c.run_id == "." || c.run_id == "..") {
      invalid("run_id must be a plain name");
    }
  } catch (const json::exception& e) {
    invalid(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(path.string() + ": " + e.what());
  }
  return parse_run_config(j, fs::absolute(path).parent_path());
}

namespace {

json hashed_fields(const RunConfig& c, bool full) {
  json models = json::array();
  for (const auto& m : c.models) models.push_back(model_to_json(m, full));
  json kinds = json::array();
  json levels = json::object();
  json sev = json::object();
  for (const auto& s : c.schedule) {
    const std::string name(name_of(s.kind));
    kinds.push_back(name);
    json ls = json::array();
    for (const auto& l : s.levels) ls.push_back(json(l));
    levels[name] = ls;
    sev[name] = s.severities;
  }
  json j{{"models", models},         {"label_template", c.label_template},
         {"kinds", kinds},           {"levels", levels},
         {"severities", sev},        {"reps", c.reps},
         {"master_seed", c.master_seed}};
  if (c.labels) j["labels"] = *c.labels;
  return j;
}

}  // namespace

json run_config_to_json(const RunConfig& c) {
  json j = hashed_fields(c, true);
  j["dataset"] = c.dataset.generic_string();
  j["output_dir"] = c.output_dir.generic_string();
  j["run_id"] = c.run_id;
  j["workers"] = c.workers;
  j["keep_images"] = c.keep_images;
  if (c.plan) j["plan_source"] = c.plan->generic_string();
  if (c.baseline_run) j["baseline_run"] = *c.baseline_run;
  if (c.baseline_model) j["baseline_model"] = *c.baseline_model;
  return j;
}

std::string config_hash(const RunConfig& config) {
  return sha256_hex(hashed_fields(config, false).dump());
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view sample_id, std::string_view kind,
                        int severity_index, int rep) {
  std::string key;
  key.reserve(sample_id.size() + kind.size() + 16);
  key.append(sample_id);
  key += '\x1f';
  key.append(kind);
  key += '\x1f';
  key += std::to_string(severity_index);
  key += '\x1f';
  key += std::to_string(rep);
  return mix64(master_seed ^ fnv1a64(key));
}

std::unique_ptr<Classifier> make_classifier(const BackendDescriptor& d, const LabelSet& labels) {
  std::shared_ptr<PredictorBackend> backend;
  if (d.type == "toy") {
    backend = toy_predictor(d.seed, labels, d.dim);
  } else if (d.type == "embed_file") {
    backend = embed_file_backend(d.embeddings);
  } else if (d.type == "http_service") {
    std::string url = d.url;
    if (url.empty()) {
      const char* env = std::getenv("RB_EMBED_URL");
      if (env) url = env;
    }
    if (url.empty()) invalid("model '" + d.model_id + "': no url and RB_EMBED_URL unset");
    backend = http_backend({url, d.model, d.max_in_flight, 60});
  } else {
    invalid("unknown backend '" + d.type + "'");
  }
  if (!d.degrade) return std::make_unique<ZeroShotClassifier>(d.model_id, backend, labels);
  auto base = std::make_unique<ZeroShotClassifier>(d.model_id + "#base", backend, labels);
  return std::make_unique<SeverityDegradingClassifier>(d.model_id, std::move(base), d.degrade->seed,
                                                       d.degrade->strength, d.degrade->hold_clean);
}

}  // namespace robustbench
