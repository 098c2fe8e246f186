#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "robustbench/corruption/catalog.hpp"

namespace robustbench {

struct DomainProfile {
  std::string domain_id;
  std::string display_name;
  std::string description;
};

// {domain_id, display_name?, description}. Throws Error(InvalidConfig).
DomainProfile load_profile(const std::filesystem::path& path);
DomainProfile profile_from_json(const nlohmann::json& j);

// The corruption-selection prompt: role sentence, quoted domain description,
// one "- Name: description" line per catalog entry, output-format example.
std::string build_prompt(const DomainProfile& profile,
                         std::span<const CatalogEntry> entries = catalog());

struct Selection {
  CorruptionKind kind;
  std::string rationale;

  bool operator==(const Selection&) const = default;
};

struct SelectionRun {
  int run_index = 0;
  std::vector<Selection> selections;
  std::vector<std::string> unknown_names;
  std::string raw_response;
  // Set when the run produced no usable output (empty response, parse failure).
  std::optional<std::string> error;

  bool selected(CorruptionKind kind) const noexcept;
};

// Extracts "<index>. <Name>: <rationale>" lines. Catalog names become
// selections (first occurrence wins); other names are kept as unknown.
// Throws Error(EmptyResponse) when no line has that shape.
SelectionRun parse_response(std::string_view text, int run_index = 0);

struct ChatRequest {
  std::string domain_id;
  int run_index = 0;
  std::string prompt;
  double temperature = 0.0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant text. Throws Error(TransportError).
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Reads <root>/<domain_id>/<run_index>.txt.
class TranscriptReplayClient final : public ChatClient {
 public:
  explicit TranscriptReplayClient(std::filesystem::path root);
  std::string complete(const ChatRequest& request) override;

 private:
  std::filesystem::path root_;
};

struct HttpChatOptions {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  std::string api_key;   // sent as a Bearer token when nonempty
  // JSON pointer to the assistant text in the reply.
  std::string reply_path = "/choices/0/message/content";
  int attempts = 3;
  int initial_backoff_ms = 500;
  int timeout_seconds = 120;
  // Every request and reply is appended here verbatim when set.
  std::optional<std::filesystem::path> audit_log;
};

// Reads {endpoint, model, reply_path?, attempts?, timeout_seconds?, audit_log?}
// and takes the API key from RB_LLM_API_KEY unless the file sets api_key.
HttpChatOptions load_chat_options(const std::filesystem::path& path);

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatOptions options);
  std::string complete(const ChatRequest& request) override;

  // Request body for a prompt: {model, temperature, messages:[{role:"user", content}]}.
  nlohmann::json request_body(const ChatRequest& request) const;

 private:
  HttpChatOptions options_;
};

struct PlanEntry {
  CorruptionKind kind;
  int votes = 0;
  std::string rationale;

  bool operator==(const PlanEntry&) const = default;
};

struct CorruptionPlan {
  std::string domain_id;
  int n_runs = 0;
  double threshold = 0.5;
  std::vector<PlanEntry> chosen;  // catalog order

  std::vector<CorruptionKind> kinds() const;
  bool contains(CorruptionKind kind) const noexcept;
};

struct PlanOptions {
  int n_runs = 10;
  double threshold = 0.5;
  double temperature = 0.0;
  int max_parallel = 1;
};

struct PlanResult {
  CorruptionPlan plan;
  std::vector<SelectionRun> runs;
};

// Per-kind vote counts over runs (a kind counts once per run).
std::map<CorruptionKind, int> vote_counts(std::span<const SelectionRun> runs);

// A kind is chosen iff votes > threshold * n_runs. The representative
// rationale is the one from the lowest-indexed run that selected the kind.
CorruptionPlan aggregate_votes(std::string domain_id, std::span<const SelectionRun> runs,
                               int n_runs, double threshold);

// Issues n_runs prompts and majority-votes the result. A run whose response
// cannot be parsed contributes no votes. Transport failures propagate.
PlanResult select_plan(const DomainProfile& profile, ChatClient& client,
                       const PlanOptions& options = {});

struct PlanRules {
  std::map<std::string, std::set<CorruptionKind>> whitelist;
  std::map<std::string, std::set<CorruptionKind>> blacklist;
};

// Curated always/never rules for the six built-in domains
// (driving, handheld, manufacturing, medical, people, satellite).
const PlanRules& default_rules();
PlanRules load_rules(const std::filesystem::path& path);
nlohmann::json rules_to_json(const PlanRules& rules);

enum class ViolationType { MissingWhitelisted, ForbiddenBlacklisted };
std::string_view to_string(ViolationType type);

struct Violation {
  ViolationType type;
  CorruptionKind kind;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_plan(const CorruptionPlan& plan, const PlanRules& rules);

// Domain x kind selection counts, kinds in catalog order.
struct SelectionHeatmap {
  std::vector<std::string> domains;
  std::vector<std::array<int, kCatalogSize>> counts;
  int n_runs = 0;

  int at(std::string_view domain, CorruptionKind kind) const;
  bool operator==(const SelectionHeatmap&) const = default;
};

using DomainRuns = std::vector<std::pair<std::string, std::vector<SelectionRun>>>;
SelectionHeatmap selection_heatmap(const DomainRuns& runs_by_domain);

nlohmann::json plan_to_json(const PlanResult& result, std::span<const Violation> violations);
PlanResult plan_from_json(const nlohmann::json& j);
PlanResult load_plan(const std::filesystem::path& path);

}  // namespace robustbench
