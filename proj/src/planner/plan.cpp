#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "robustbench/error.hpp"
#include "robustbench/planner/planner.hpp"

namespace robustbench {

std::vector<CorruptionKind> CorruptionPlan::kinds() const {
  std::vector<CorruptionKind> out;
  for (const auto& e : chosen) out.push_back(e.kind);
  return out;
}

bool CorruptionPlan::contains(CorruptionKind kind) const noexcept {
  return std::any_of(chosen.begin(), chosen.end(), [kind](const PlanEntry& e) { return e.kind == kind; });
}

std::map<CorruptionKind, int> vote_counts(std::span<const SelectionRun> runs) {
  std::map<CorruptionKind, int> counts;
  for (const auto& run : runs)
    for (const auto& entry : catalog())
      if (run.selected(entry.kind)) ++counts[entry.kind];
  return counts;
}

CorruptionPlan aggregate_votes(std::string domain_id, std::span<const SelectionRun> runs,
                               int n_runs, double threshold) {
  if (n_runs < 1) throw Error(ErrorCode::InvalidConfig, "n_runs must be >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "threshold must lie in (0, 1]");
  }
  CorruptionPlan plan{std::move(domain_id), n_runs, threshold, {}};
  const auto counts = vote_counts(runs);
  for (const auto& entry : catalog()) {
    const auto it = counts.find(entry.kind);
    if (it == counts.end() || !(it->second > threshold * n_runs)) continue;
    const SelectionRun* first = nullptr;
    for (const auto& run : runs) {
      if (run.selected(entry.kind) && (!first || run.run_index < first->run_index)) first = &run;
    }
    std::string rationale;
    for (const auto& s : first->selections)
      if (s.kind == entry.kind) rationale = s.rationale;
    plan.chosen.push_back({entry.kind, it->second, rationale});
  }
  return plan;
}

PlanResult select_plan(const DomainProfile& profile, ChatClient& client, const PlanOptions& options) {
  if (options.n_runs < 1) throw Error(ErrorCode::InvalidConfig, "n_runs must be >= 1");
  const std::string prompt = build_prompt(profile);
  std::vector<SelectionRun> runs(static_cast<std::size_t>(options.n_runs));

  auto do_run = [&](int i) {
    const ChatRequest request{profile.domain_id, i, prompt, options.temperature};
    const std::string reply = client.complete(request);
    try {
      runs[static_cast<std::size_t>(i)] = parse_response(reply, i);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyResponse) throw;
      SelectionRun empty;
      empty.run_index = i;
      empty.raw_response = reply;
      empty.error = e.what();
      runs[static_cast<std::size_t>(i)] = std::move(empty);
    }
  };

  if (options.max_parallel <= 1) {
    for (int i = 0; i < options.n_runs; ++i) do_run(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> workers;
      const int n_workers = std::min(options.max_parallel, options.n_runs);
      for (int w = 0; w < n_workers; ++w) {
        workers.emplace_back([&] {
          for (int i = next++; i < options.n_runs; i = next++) {
            try {
              do_run(i);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  PlanResult result;
  result.plan = aggregate_votes(profile.domain_id, runs, options.n_runs, options.threshold);
  result.runs = std::move(runs);
  return result;
}

int SelectionHeatmap::at(std::string_view domain, CorruptionKind kind) const {
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (domains[i] == domain) return counts[i][static_cast<std::size_t>(kind)];
  }
  throw Error(ErrorCode::InvalidConfig, "heatmap has no domain '" + std::string(domain) + "'");
}

SelectionHeatmap selection_heatmap(const DomainRuns& runs_by_domain) {
  SelectionHeatmap h;
  for (const auto& [domain, runs] : runs_by_domain) {
    h.domains.push_back(domain);
    std::array<int, kCatalogSize> row{};
    for (const auto& [kind, n] : vote_counts(runs)) row[static_cast<std::size_t>(kind)] = n;
    h.counts.push_back(row);
    h.n_runs = std::max(h.n_runs, static_cast<int>(runs.size()));
  }
  return h;
}

nlohmann::json plan_to_json(const PlanResult& result, std::span<const Violation> violations) {
  using nlohmann::json;
  json chosen = json::array();
  for (const auto& e : result.plan.chosen) {
    chosen.push_back({{"kind", name_of(e.kind)}, {"votes", e.votes}, {"rationale", e.rationale}});
  }
  json vio = json::array();
  for (const auto& v : violations) vio.push_back({{"type", to_string(v.type)}, {"kind", name_of(v.kind)}});
  json counts = json::object();
  const auto votes = vote_counts(result.runs);
  for (const auto& entry : catalog()) {
    const auto it = votes.find(entry.kind);
    counts[std::string(entry.name)] = it == votes.end() ? 0 : it->second;
  }
  json runs = json::array();
  for (const auto& r : result.runs) {
    json sel = json::array();
    for (const auto& s : r.selections) sel.push_back({{"kind", name_of(s.kind)}, {"rationale", s.rationale}});
    json run{{"run_index", r.run_index},
             {"selections", sel},
             {"unknown", r.unknown_names},
             {"raw_response", r.raw_response}};
    if (r.error) run["error"] = *r.error;
    runs.push_back(std::move(run));
  }
  return {{"domain_id", result.plan.domain_id},
          {"n_runs", result.plan.n_runs},
          {"threshold", result.plan.threshold},
          {"chosen", chosen},
          {"violations", vio},
          {"counts", counts},
          {"runs", runs}};
}

PlanResult plan_from_json(const nlohmann::json& j) {
  PlanResult r;
  try {
    r.plan.domain_id = j.at("domain_id").get<std::string>();
    r.plan.n_runs = j.at("n_runs").get<int>();
    r.plan.threshold = j.at("threshold").get<double>();
    for (const auto& e : j.at("chosen")) {
      r.plan.chosen.push_back({kind_from_name(e.at("kind").get<std::string>()), e.at("votes").get<int>(),
                               e.value("rationale", std::string())});
    }
    if (j.contains("runs")) {
      for (const auto& jr : j.at("runs")) {
        SelectionRun run;
        run.run_index = jr.at("run_index").get<int>();
        for (const auto& s : jr.at("selections")) {
          run.selections.push_back({kind_from_name(s.at("kind").get<std::string>()),
                                    s.value("rationale", std::string())});
        }
        run.unknown_names = jr.value("unknown", std::vector<std::string>{});
        run.raw_response = jr.value("raw_response", std::string());
        if (jr.contains("error")) run.error = jr.at("error").get<std::string>();
        r.runs.push_back(std::move(run));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("plan file: ") + e.what());
  }
  return r;
}

PlanResult load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open plan " + path.string());
  try {
    return plan_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

}  // namespace robustbench
