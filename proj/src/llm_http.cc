#include <regex>

#include "httplib.h"
#include "json.hpp"
#include "radlabel/errors.h"
#include "radlabel/llm.h"

namespace radlabel {
namespace {

class HttpBackend : public CompletionBackend {
 public:
  explicit HttpBackend(const PromptConfig &config) : config_(config) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config.base_url, m, kUrl)) {
      throw DataError("invalid endpoint base URL '" + config.base_url + "'");
    }
    host_ = m[1].str();
    path_ = m[2].str();
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
  }

  std::string complete(const Prompt &prompt) override {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages",
         {{{"role", "system"}, {"content", prompt.system}},
          {{"role", "user"}, {"content", prompt.user}}}}};
    if (config_.temperature) body["temperature"] = *config_.temperature;
    if (config_.max_tokens) body["max_tokens"] = *config_.max_tokens;

    // One client per call keeps concurrent workers independent.
    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      throw TransportError("request to " + host_ + path_ + " failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status == 429 || res->status >= 500) {
      throw TransportError("endpoint answered HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
      throw TransportError("endpoint answered HTTP " + std::to_string(res->status), false);
    }
    try {
      auto doc = nlohmann::json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
      throw TransportError(std::string("malformed chat-completion response: ") + e.what(),
                           false);
    }
  }

 private:
  PromptConfig config_;
  std::string host_;
  std::string path_;
};

}  // namespace

std::unique_ptr<CompletionBackend> make_http_backend(const PromptConfig &config) {
  if (config.base_url.empty()) {
    throw DataError("no endpoint configured (set RL_LLM_BASE_URL or --base-url)");
  }
  return std::make_unique<HttpBackend>(config);
}

}  // namespace radlabel
