#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "robustbench/base64.hpp"
#include "robustbench/error.hpp"
#include "robustbench/image_io.hpp"
#include "robustbench/planner/planner.hpp"
#include "robustbench/predictor/backend.hpp"
#include "synthetic.hpp"

using namespace robustbench;
using nlohmann::json;

namespace {

// httplib server on an ephemeral port, stopped on destruction.
class MockServer {
 public:
  MockServer() = default;
  ~MockServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }

  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InvalidConfig;
}

// Embedding service stub: each image embeds as [width, height, 1], each text
// as [length, 0, 0].
struct EmbedStub {
  std::size_t dim = 3;
  int health_status = 200;
  int embed_status = 200;
  bool drop_one = false;
  std::size_t reply_dim = 3;
  std::mutex mu;
  std::vector<std::string> request_ids;
  std::vector<json> bodies;

  void install(httplib::Server& s) {
    s.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      res.status = health_status;
      res.set_content(json{{"status", "ok"}, {"model", "stub"}, {"dim", dim}, {"resolution", 224}}.dump(),
                      "application/json");
    });
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      {
        std::lock_guard lock(mu);
        request_ids.push_back(req.get_header_value("X-Request-Id"));
        bodies.push_back(body);
      }
      if (embed_status != 200) {
        res.status = embed_status;
        res.set_content("busy", "text/plain");
        return;
      }
      json rows = json::array();
      if (body.contains("images")) {
        for (const auto& b64 : body["images"]) {
          const auto bytes = base64_decode(b64.get<std::string>());
          const RasterImage img = decode_image(*bytes);
          rows.push_back({double(img.width()), double(img.height()), 1.0});
        }
      } else {
        for (const auto& t : body["texts"]) rows.push_back({double(t.get<std::string>().size()), 0.0, 0.0});
      }
      if (drop_one && !rows.empty()) rows.erase(rows.begin());
      res.set_content(json{{"dim", reply_dim}, {"embeddings", rows}}.dump(), "application/json");
    };
    s.Post("/v1/embed/image", handler);
    s.Post("/v1/embed/text", handler);
  }
};

}  // namespace

TEST(HttpBackend, HealthAndEmbeddings) {
  MockServer m;
  EmbedStub stub;
  stub.install(m.server);
  m.start();
  auto b = http_backend({m.url(), "", 2, 5});
  EXPECT_EQ(b->info().dim, 3u);
  EXPECT_EQ(b->info().model, "stub");
  EXPECT_EQ(b->info().resolution, 224);
  EXPECT_EQ(b->info().kind, BackendKind::HttpService);

  const std::vector<RasterImage> imgs{RasterImage(5, 7), RasterImage(2, 3)};
  const auto e = b->embed_images(imgs);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].values, (std::vector<double>{5, 7, 1}));
  EXPECT_EQ(e[1].values, (std::vector<double>{2, 3, 1}));

  const std::vector<std::string> texts{"a photo of a cat", "dog"};
  const auto t = b->embed_texts(texts);
  EXPECT_EQ(t[1].values, (std::vector<double>{3, 0, 0}));

  std::lock_guard lock(stub.mu);
  ASSERT_EQ(stub.request_ids.size(), 2u);
  EXPECT_FALSE(stub.request_ids[0].empty());
  EXPECT_NE(stub.request_ids[0], stub.request_ids[1]);
  EXPECT_EQ(stub.bodies[0].at("model"), "stub");
}

TEST(HttpBackend, ConcurrentCallsSucceed) {
  MockServer m;
  EmbedStub stub;
  stub.install(m.server);
  m.start();
  auto b = http_backend({m.url(), "clip", 2, 5});
  std::atomic<int> ok{0};
  std::vector<std::thread> ts;
  for (int i = 0; i < 6; ++i) {
    ts.emplace_back([&, i] {
      const std::vector<RasterImage> imgs{RasterImage(i + 1, 1)};
      if (b->embed_images(imgs)[0].values[0] == i + 1) ++ok;
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(ok.load(), 6);
  std::set<std::string> ids(stub.request_ids.begin(), stub.request_ids.end());
  EXPECT_EQ(ids.size(), 6u);
}

TEST(HttpBackend, Failures) {
  {
    MockServer m;
    EmbedStub stub;
    stub.health_status = 500;
    stub.install(m.server);
    m.start();
    EXPECT_EQ(code_of([&] { http_backend({m.url(), "", 1, 5}); }), ErrorCode::BackendUnavailable);
  }
  {
    MockServer m;
    EmbedStub stub;
    stub.install(m.server);
    m.start();
    auto b = http_backend({m.url(), "", 1, 5});
    const std::vector<std::string> texts{"x", "y"};
    stub.embed_status = 503;
    EXPECT_EQ(code_of([&] { b->embed_texts(texts); }), ErrorCode::BackendUnavailable);
    stub.embed_status = 400;
    EXPECT_EQ(code_of([&] { b->embed_texts(texts); }), ErrorCode::EmbeddingFailure);
    stub.embed_status = 200;
    stub.drop_one = true;
    EXPECT_EQ(code_of([&] { b->embed_texts(texts); }), ErrorCode::EmbeddingFailure);
    stub.drop_one = false;
    stub.reply_dim = 4;
    EXPECT_EQ(code_of([&] { b->embed_texts(texts); }), ErrorCode::DimensionMismatch);
  }
  EXPECT_EQ(code_of([] { http_backend({"http://127.0.0.1:1", "", 1, 1}); }), ErrorCode::BackendUnavailable);
}

TEST(HttpChat, RetriesThenReturnsText) {
  MockServer m;
  std::atomic<int> calls{0};
  std::string auth;
  json last_body;
  m.server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    last_body = json::parse(req.body);
    if (calls.fetch_add(1) < 2) {
      res.status = 500;
      return;
    }
    res.set_content(json{{"choices", {{{"message", {{"content", "1. Rain: wet"}}}}}}}.dump(),
                    "application/json");
  });
  m.start();
  const auto dir = rbtest::temp_dir("chat");
  HttpChatOptions o;
  o.endpoint = m.url() + "/v1/chat";
  o.model = "gpt";
  o.api_key = "secret";
  o.attempts = 3;
  o.initial_backoff_ms = 1;
  o.audit_log = dir / "audit.jsonl";
  HttpChatClient client(o);
  const ChatRequest req{"driving", 3, "PROMPT", 0.7};
  EXPECT_EQ(client.complete(req), "1. Rain: wet");
  EXPECT_EQ(calls.load(), 3);
  EXPECT_EQ(auth, "Bearer secret");
  EXPECT_EQ(last_body.at("model"), "gpt");
  EXPECT_EQ(last_body.at("temperature").get<double>(), 0.7);
  EXPECT_EQ(last_body.at("messages")[0].at("content"), "PROMPT");
  const std::string log = rbtest::read_file(dir / "audit.jsonl");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 3);
  EXPECT_NE(log.find("1. Rain: wet"), std::string::npos);
}

TEST(HttpChat, ExhaustedAttemptsIsTransportError) {
  MockServer m;
  std::atomic<int> calls{0};
  m.server.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 429;
  });
  m.start();
  HttpChatOptions o;
  o.endpoint = m.url() + "/c";
  o.model = "m";
  o.attempts = 2;
  o.initial_backoff_ms = 1;
  HttpChatClient client(o);
  EXPECT_EQ(code_of([&] { client.complete({"d", 0, "p", 0.0}); }), ErrorCode::TransportError);
  EXPECT_EQ(calls.load(), 2);

  o.endpoint = "no-scheme";
  EXPECT_EQ(code_of([&] { HttpChatClient bad(o); }), ErrorCode::InvalidConfig);
}

TEST(HttpChat, DrivesPlanSelection) {
  MockServer m;
  m.server.Post("/c", [&](const httplib::Request& req, httplib::Response& res) {
    const auto prompt = json::parse(req.body).at("messages")[0].at("content").get<std::string>();
    const std::string text = prompt.find("\"roads\"") != std::string::npos ? "1. Rain: wet\n2. Shadow: trees"
                                                                           : "1. Brightness: sun";
    res.set_content(json{{"choices", {{{"message", {{"content", text}}}}}}}.dump(), "application/json");
  });
  m.start();
  HttpChatOptions o;
  o.endpoint = m.url() + "/c";
  o.model = "m";
  HttpChatClient client(o);
  PlanOptions po;
  po.n_runs = 3;
  po.max_parallel = 3;
  const auto r = select_plan({"driving", "Driving", "roads"}, client, po);
  ASSERT_EQ(r.plan.chosen.size(), 2u);
  EXPECT_EQ(r.plan.chosen[0].kind, CorruptionKind::Shadow);
  EXPECT_EQ(r.plan.chosen[1].votes, 3);
}

TEST(HttpChat, LoadOptionsReadsEnvKey) {
  const auto dir = rbtest::temp_dir("chatcfg");
  rbtest::write_file(dir / "llm.json", R"({"endpoint":"http://x/y","model":"m","attempts":5})");
  ::setenv("RB_LLM_API_KEY", "fromenv", 1);
  const auto o = load_chat_options(dir / "llm.json");
  ::unsetenv("RB_LLM_API_KEY");
  EXPECT_EQ(o.api_key, "fromenv");
  EXPECT_EQ(o.attempts, 5);
  EXPECT_EQ(o.reply_path, "/choices/0/message/content");
}
