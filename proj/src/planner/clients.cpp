#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "robustbench/error.hpp"
#include "robustbench/planner/planner.hpp"

namespace robustbench {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::mutex& audit_mutex() {
  static std::mutex m;
  return m;
}

void audit(const std::optional<std::filesystem::path>& log, const nlohmann::json& entry) {
  if (!log) return;
  std::lock_guard lock(audit_mutex());
  std::ofstream out(*log, std::ios::app);
  out << entry.dump() << '\n';
}

}  // namespace

TranscriptReplayClient::TranscriptReplayClient(std::filesystem::path root) : root_(std::move(root)) {
  if (!std::filesystem::is_directory(root_)) {
    throw Error(ErrorCode::TransportError, "transcript directory " + root_.string() + " not found");
  }
}

std::string TranscriptReplayClient::complete(const ChatRequest& request) {
  const auto path = root_ / request.domain_id / (std::to_string(request.run_index) + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::TransportError, "no transcript " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HttpChatOptions load_chat_options(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open LLM config " + path.string());
  HttpChatOptions o;
  try {
    const auto j = nlohmann::json::parse(in);
    o.endpoint = j.at("endpoint").get<std::string>();
    o.model = j.at("model").get<std::string>();
    o.reply_path = j.value("reply_path", o.reply_path);
    o.attempts = j.value("attempts", o.attempts);
    o.initial_backoff_ms = j.value("initial_backoff_ms", o.initial_backoff_ms);
    o.timeout_seconds = j.value("timeout_seconds", o.timeout_seconds);
    o.api_key = j.value("api_key", std::string());
    if (j.contains("audit_log")) o.audit_log = j.at("audit_log").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  if (o.api_key.empty()) {
    if (const char* key = std::getenv("RB_LLM_API_KEY")) o.api_key = key;
  }
  return o;
}

HttpChatClient::HttpChatClient(HttpChatOptions options) : options_(std::move(options)) {
  if (options_.attempts < 1) throw Error(ErrorCode::InvalidConfig, "attempts must be >= 1");
  split_url(options_.endpoint);
}

nlohmann::json HttpChatClient::request_body(const ChatRequest& request) const {
  return {{"model", options_.model},
          {"temperature", request.temperature},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})}};
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  const auto [origin, path] = split_url(options_.endpoint);
  const std::string body = request_body(request).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_error;
  int backoff_ms = options_.initial_backoff_ms;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    httplib::Client client(origin);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    auto res = client.Post(path, headers, body, "application/json");
    nlohmann::json entry{{"domain_id", request.domain_id},
                         {"run_index", request.run_index},
                         {"attempt", attempt},
                         {"request", body}};
    if (!res) {
      last_error = httplib::to_string(res.error());
      entry["error"] = last_error;
    } else {
      entry["status"] = res->status;
      entry["response"] = res->body;
      if (res->status == 200) {
        audit(options_.audit_log, entry);
        try {
          const auto reply = nlohmann::json::parse(res->body);
          return reply.at(nlohmann::json::json_pointer(options_.reply_path)).get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          // A malformed 200 reply is not retried.
          throw Error(ErrorCode::TransportError,
                      "reply has no text at " + options_.reply_path + ": " + e.what());
        }
      }
      last_error = "HTTP " + std::to_string(res->status);
    }
    audit(options_.audit_log, entry);
    if (attempt < options_.attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
  }
  throw Error(ErrorCode::TransportError, options_.endpoint + " failed after " +
                                             std::to_string(options_.attempts) +
                                             " attempts: " + last_error);
}

}  // namespace robustbench
