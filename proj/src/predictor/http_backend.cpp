#include <atomic>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>

#include "robustbench/base64.hpp"
#include "robustbench/error.hpp"
#include "robustbench/image_io.hpp"
#include "robustbench/predictor/backend.hpp"

namespace robustbench {

namespace {

using nlohmann::json;

class HttpBackend final : public PredictorBackend {
 public:
  explicit HttpBackend(const HttpBackendOptions& options)
      : options_(options), slots_(std::max(1, options.max_in_flight)) {
    auto client = make_client();
    auto res = client->Get("/v1/health");
    if (!res) {
      throw Error(ErrorCode::BackendUnavailable,
                  options_.base_url + "/v1/health: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::BackendUnavailable,
                  options_.base_url + "/v1/health returned " + std::to_string(res->status));
    }
    try {
      const auto body = json::parse(res->body);
      info_.kind = BackendKind::HttpService;
      info_.dim = body.at("dim").get<std::size_t>();
      info_.model = body.value("model", options_.model);
      info_.resolution = body.value("resolution", 0);
      info_.reentrant = true;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BackendUnavailable, std::string("malformed health reply: ") + e.what());
    }
    if (options_.model.empty()) options_.model = info_.model;
  }

  const BackendInfo& info() const override { return info_; }

  std::vector<Embedding> embed_images(std::span<const RasterImage> images) override {
    json body;
    body["model"] = options_.model;
    body["images"] = json::array();
    for (const auto& img : images) body["images"].push_back(base64_encode(encode_png(img)));
    return post("/v1/embed/image", body, images.size());
  }

  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override {
    json body;
    body["model"] = options_.model;
    body["texts"] = json(std::vector<std::string>(texts.begin(), texts.end()));
    return post("/v1/embed/text", body, texts.size());
  }

 private:
  std::unique_ptr<httplib::Client> make_client() const {
    auto client = std::make_unique<httplib::Client>(options_.base_url);
    client->set_connection_timeout(options_.timeout_seconds, 0);
    client->set_read_timeout(options_.timeout_seconds, 0);
    client->set_write_timeout(options_.timeout_seconds, 0);
    return client;
  }

  std::vector<Embedding> post(const std::string& route, const json& body, std::size_t expected) {
    const std::string request_id = "rb-" + std::to_string(next_request_.fetch_add(1));
    const std::string where = route + " [" + request_id + "]";
    slots_.acquire();
    httplib::Result res = [&] {
      auto client = make_client();
      httplib::Headers headers{{"X-Request-Id", request_id}};
      return client->Post(route, headers, body.dump(), "application/json");
    }();
    slots_.release();
    if (!res) {
      throw Error(ErrorCode::BackendUnavailable, where + ": " + httplib::to_string(res.error()));
    }
    if (res->status == 503) throw Error(ErrorCode::BackendUnavailable, where + ": 503 " + res->body);
    if (res->status != 200) {
      throw Error(ErrorCode::EmbeddingFailure,
                  where + ": HTTP " + std::to_string(res->status) + " " + res->body);
    }
    std::vector<Embedding> out;
    try {
      const auto reply = json::parse(res->body);
      const auto dim = reply.at("dim").get<std::size_t>();
      if (dim != info_.dim) {
        throw Error(ErrorCode::DimensionMismatch, where + ": reply dim " + std::to_string(dim) +
                                                      " != health dim " + std::to_string(info_.dim));
      }
      for (const auto& row : reply.at("embeddings")) {
        out.push_back(Embedding{row.get<std::vector<double>>()});
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::EmbeddingFailure, where + ": malformed reply: " + e.what());
    }
    if (out.size() != expected) {
      throw Error(ErrorCode::EmbeddingFailure, where + ": expected " + std::to_string(expected) +
                                                   " embeddings, got " + std::to_string(out.size()));
    }
    return out;
  }

  HttpBackendOptions options_;
  BackendInfo info_;
  std::counting_semaphore<> slots_;
  std::atomic<std::uint64_t> next_request_{1};
};

}  // namespace

std::shared_ptr<PredictorBackend> http_backend(const HttpBackendOptions& options) {
  return std::make_shared<HttpBackend>(options);
}

}  // namespace robustbench
