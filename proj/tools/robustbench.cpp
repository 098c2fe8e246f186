// robustbench command-line front end.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include "robustbench/corruption/corruption.hpp"
#include "robustbench/error.hpp"
#include "robustbench/harness/runner.hpp"
#include "robustbench/harness/summarize.hpp"
#include "robustbench/image_io.hpp"
#include "robustbench/planner/planner.hpp"
#include "robustbench/report/report.hpp"

namespace fs = std::filesystem;
using namespace robustbench;

namespace {

fs::path locate_run(const std::string& run, const fs::path& runs_dir) {
  const fs::path direct(run);
  if (fs::exists(direct / "header.json")) return direct;
  return runs_dir / run;
}

void print_result(const RunResult& r) {
  std::cout << "run " << r.run_id << ": " << r.new_records << " new records, " << r.new_skipped
            << " skipped cells, " << r.total_records << " records in store\n"
            << (r.complete ? "complete" : "incomplete; continue with `robustbench resume " + r.run_id + "`")
            << "\n";
}

int cmd_plan(const std::vector<std::string>& domains, const std::string& transcripts,
             const std::string& llm_config, const PlanOptions& options, const std::string& rules_path,
             const fs::path& out_dir) {
  std::unique_ptr<ChatClient> client;
  if (!transcripts.empty()) {
    client = std::make_unique<TranscriptReplayClient>(transcripts);
  } else if (!llm_config.empty()) {
    client = std::make_unique<HttpChatClient>(load_chat_options(llm_config));
  } else {
    throw Error(ErrorCode::InvalidConfig, "plan needs --transcripts or --llm-config");
  }
  const PlanRules rules = rules_path.empty() ? default_rules() : load_rules(rules_path);
  fs::create_directories(out_dir);

  DomainRuns all;
  for (const auto& path : domains) {
    const DomainProfile profile = load_profile(path);
    PlanResult result = select_plan(profile, *client, options);
    const auto violations = validate_plan(result.plan, rules);
    const fs::path out = out_dir / (profile.domain_id + ".plan.json");
    std::ofstream(out) << plan_to_json(result, violations).dump(2) << '\n';

    std::cout << profile.domain_id << ": " << result.plan.chosen.size() << " kinds chosen (strict majority of "
              << options.n_runs << " runs)\n";
    for (const auto& e : result.plan.chosen) std::cout << "  " << name_of(e.kind) << " " << e.votes << "\n";
    for (const auto& v : violations) std::cout << "  violation: " << to_string(v.type) << " " << name_of(v.kind) << "\n";
    for (const auto& r : result.runs) {
      if (r.error) std::cout << "  run " << r.run_index << ": " << *r.error << "\n";
      for (const auto& u : r.unknown_names) std::cout << "  run " << r.run_index << ": unknown kind '" << u << "'\n";
    }
    std::cout << "  wrote " << out.string() << "\n";
    all.emplace_back(profile.domain_id, std::move(result.runs));
  }
  for (const auto& f : write_heatmap(selection_heatmap(all), rules, out_dir)) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

struct BaselineChoice {
  std::optional<StoredRun> run;
  std::optional<std::string> model;
};

BaselineChoice choose_baseline(const StoredRun& run, const std::string& baseline_arg,
                               const std::string& baseline_model_arg, const fs::path& runs_dir) {
  BaselineChoice c;
  if (!baseline_model_arg.empty()) c.model = baseline_model_arg;
  else if (run.header.config.contains("baseline_model")) c.model = run.header.config["baseline_model"].get<std::string>();
  std::string id = baseline_arg;
  if (id.empty() && run.header.config.contains("baseline_run")) id = run.header.config["baseline_run"].get<std::string>();
  if (!id.empty()) {
    c.run = id == run.header.run_id ? run : load_run(locate_run(id, runs_dir));
  } else if (c.model) {
    c.run = run;  // baseline model lives in the same run
  }
  return c;
}

int cmd_summarize(const std::string& run_id, const std::string& baseline, const std::string& baseline_model,
                  const fs::path& runs_dir, const std::string& out) {
  const StoredRun run = load_run(locate_run(run_id, runs_dir));
  const BaselineChoice b = choose_baseline(run, baseline, baseline_model, runs_dir);
  SummarizeOptions opts;
  opts.baseline_model = b.model;
  const RunSummary s = summarize_run(run, b.run ? &*b.run : nullptr, opts);
  const std::string text = summary_to_json(s).dump(2);
  if (out.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream(out) << text << '\n';
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_report(const std::string& run_id, const std::string& baseline, const std::string& baseline_model,
               const fs::path& runs_dir, const fs::path& out_dir, const std::vector<std::string>& plans,
               const std::string& rules_path, const std::string& domain) {
  const StoredRun run = load_run(locate_run(run_id, runs_dir));
  const BaselineChoice b = choose_baseline(run, baseline, baseline_model, runs_dir);
  SummarizeOptions opts;
  opts.baseline_model = b.model;
  const RunSummary s = summarize_run(run, b.run ? &*b.run : nullptr, opts);

  std::vector<TableRow> rows = table_rows(s);
  TableSpec layout;
  layout.domain_id = domain;
  layout.show_relative = b.run.has_value();
  if (b.run) {
    const std::string bid = b.model ? *b.model : s.models.front().baseline_model_id.value_or("");
    layout.baseline_id = bid;
    const bool present = std::any_of(rows.begin(), rows.end(), [&](const TableRow& r) { return r.model_id == bid; });
    if (!present && b.run->header.run_id != run.header.run_id) {
      SummarizeOptions self;
      self.baseline_model = bid;
      const RunSummary bs = summarize_run(*b.run, &*b.run, self);
      for (const auto& r : table_rows(bs))
        if (r.model_id == bid) rows.push_back(r);
    }
  }
  const ReportOutputs outputs = write_run_report(s, rows, layout, out_dir);
  for (const auto& a : outputs.advisories) std::cout << "note: " << a << "\n";
  for (const auto& f : outputs.files) std::cout << "wrote " << f.string() << "\n";

  std::vector<std::string> plan_files = plans;
  if (plan_files.empty() && run.header.config.contains("plan_source")) {
    const std::string p = run.header.config["plan_source"].get<std::string>();
    if (fs::exists(p)) plan_files.push_back(p);
  }
  if (!plan_files.empty()) {
    DomainRuns all;
    for (const auto& p : plan_files) {
      PlanResult r = load_plan(p);
      all.emplace_back(r.plan.domain_id, std::move(r.runs));
    }
    const PlanRules rules = rules_path.empty() ? default_rules() : load_rules(rules_path);
    for (const auto& f : write_heatmap(selection_heatmap(all), rules, out_dir)) std::cout << "wrote " << f.string() << "\n";
  }
  return 0;
}

int cmd_corrupt(const std::string& in, const std::string& kind_name, int severity, std::uint64_t seed,
                const std::vector<std::string>& overrides, const std::string& out) {
  const CorruptionKind kind = kind_from_name(kind_name);
  const SeverityGrid& grid = severity_grid(kind);
  if (severity < 0 || static_cast<std::size_t>(severity) >= grid.size()) {
    throw Error(ErrorCode::InvalidParams, kind_name + " has severities 0.." + std::to_string(grid.size() - 1));
  }
  ParamMap params = grid.levels[static_cast<std::size_t>(severity)];
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidParams, "--param expects name=value, got " + o);
    params[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
  }
  write_image(out, apply(read_image(in), kind, params, seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain-specific robustness evaluation of zero-shot image classifiers"};
  app.require_subcommand(1);
  fs::path runs_dir = "runs";
  app.add_option("--runs-dir", runs_dir, "Directory holding run stores")->capture_default_str();

  auto* plan = app.add_subcommand("plan", "Select corruption kinds for domains by LLM voting");
  std::vector<std::string> domains;
  std::string transcripts, llm_config, rules_path;
  PlanOptions popts;
  fs::path plan_out = "plans";
  plan->add_option("--domain", domains, "Domain profile JSON (repeatable)")->required();
  plan->add_option("--transcripts", transcripts, "Replay recorded replies from <dir>/<domain>/<run>.txt");
  plan->add_option("--llm-config", llm_config, "Chat endpoint settings JSON (key from RB_LLM_API_KEY)");
  plan->add_option("--runs", popts.n_runs, "Independent LLM runs per domain")->capture_default_str();
  plan->add_option("--threshold", popts.threshold, "Vote fraction a kind must exceed")->capture_default_str();
  plan->add_option("--temperature", popts.temperature, "Sampling temperature")->capture_default_str();
  plan->add_option("--parallel", popts.max_parallel, "Concurrent LLM requests")->capture_default_str();
  plan->add_option("--rules", rules_path, "Whitelist/blacklist JSON (default: built-in rules)");
  plan->add_option("--out", plan_out, "Output directory")->capture_default_str();

  auto* runc = app.add_subcommand("run", "Execute a run matrix");
  std::string config_path;
  int workers = 0;
  std::size_t max_records = 0;
  runc->add_option("--config", config_path, "Run config JSON")->required();
  runc->add_option("--workers", workers, "Override worker count");
  runc->add_option("--max-records", max_records, "Stop after this many new records (resumable)");

  auto* resumec = app.add_subcommand("resume", "Finish an interrupted run");
  std::string run_id;
  std::string resume_config;
  resumec->add_option("run-id", run_id, "Run id or store directory")->required();
  resumec->add_option("--config", resume_config, "Config that must match the stored run");
  resumec->add_option("--workers", workers, "Override worker count");

  auto* summ = app.add_subcommand("summarize", "Compute robustness metrics for a stored run");
  std::string baseline, baseline_model, summary_out;
  summ->add_option("run-id", run_id, "Run id or store directory")->required();
  summ->add_option("--baseline", baseline, "Baseline run id");
  summ->add_option("--baseline-model", baseline_model, "Baseline model id within the baseline run");
  summ->add_option("--out", summary_out, "Write JSON here instead of stdout");

  auto* rep = app.add_subcommand("report", "Render tables, curves and heatmaps");
  fs::path report_out;
  std::vector<std::string> plan_files;
  std::string domain;
  rep->add_option("run-id", run_id, "Run id or store directory")->required();
  rep->add_option("--baseline", baseline, "Baseline run id");
  rep->add_option("--baseline-model", baseline_model, "Baseline model id within the baseline run");
  rep->add_option("--out", report_out, "Output directory")->required();
  rep->add_option("--plans", plan_files, "Plan files for the selection heatmap");
  rep->add_option("--rules", rules_path, "Whitelist/blacklist JSON for the heatmap");
  rep->add_option("--domain", domain, "Domain label for the summary table");

  auto* cor = app.add_subcommand("corrupt", "Apply one corruption to one image");
  std::string in_img, kind, out_img;
  int severity = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> params;
  cor->add_option("--in", in_img, "Input PNG or JPEG")->required();
  cor->add_option("--kind", kind, "Corruption kind name")->required();
  cor->add_option("--severity", severity, "Grid level index")->capture_default_str();
  cor->add_option("--seed", seed, "Instance seed")->capture_default_str();
  cor->add_option("--param", params, "Override a parameter, name=value");
  cor->add_option("--out", out_img, "Output image (.png or .jpg)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return cmd_plan(domains, transcripts, llm_config, popts, rules_path, plan_out);
    if (*runc) {
      RunConfig config = load_run_config(config_path);
      if (workers > 0) config.workers = workers;
      RunOptions options;
      if (max_records > 0) options.max_new_records = max_records;
      print_result(run(config, options));
      return 0;
    }
    if (*resumec) {
      std::optional<RunConfig> config;
      if (!resume_config.empty()) config = load_run_config(resume_config);
      if (workers > 0) {
        if (!config) {
          const StoredRun stored = load_run(locate_run(run_id, runs_dir));
          config = parse_run_config(stored.header.config, stored.dir);
        }
        config->workers = workers;
      }
      print_result(resume(locate_run(run_id, runs_dir), config));
      return 0;
    }
    if (*summ) return cmd_summarize(run_id, baseline, baseline_model, runs_dir, summary_out);
    if (*rep) return cmd_report(run_id, baseline, baseline_model, runs_dir, report_out, plan_files, rules_path, domain);
    if (*cor) return cmd_corrupt(in_img, kind, severity, seed, params, out_img);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
