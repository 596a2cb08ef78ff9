#include <thread>

#include <fmt/core.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "licl/errors.hpp"
#include "licl/llm_gateway.hpp"

namespace licl {

using nlohmann::json;

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

Url split_url(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw TransportError(fmt::format("endpoint '{}' has no scheme", endpoint));
  const auto path_start = endpoint.find('/', scheme_end + 3);
  Url u;
  u.origin = endpoint.substr(0, path_start);
  u.path = path_start == std::string::npos ? "" : endpoint.substr(path_start);
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

}  // namespace

OpenAIClient::OpenAIClient(OpenAIConfig cfg) : cfg_(std::move(cfg)) {
  split_url(cfg_.endpoint);
  if (cfg_.max_attempts < 1) cfg_.max_attempts = 1;
}

void OpenAIClient::admit() {
  if (cfg_.requests_per_minute <= 0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / cfg_.requests_per_minute));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(limiter_mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

std::string OpenAIClient::do_complete(const CompletionRequest& req) {
  const Url url = split_url(cfg_.endpoint);
  json body{{"model", cfg_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens}};
  for (const auto& [key, value] : cfg_.options) {
    body[key] = json::parse(value, nullptr, false).is_discarded() ? json(value) : json::parse(value);
  }
  const std::string payload = body.dump();

  httplib::Client client(url.origin);
  client.set_connection_timeout(30);
  client.set_read_timeout(static_cast<time_t>(cfg_.timeout.count()));
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  std::string log;
  auto backoff = cfg_.initial_backoff;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    admit();
    auto res = client.Post(url.path + "/chat/completions", headers, payload, "application/json");
    std::string failure;
    bool retryable = true;
    if (!res) {
      failure = httplib::to_string(res.error());
    } else if (res->status == 200) {
      const json reply = json::parse(res->body, nullptr, false);
      if (!reply.is_discarded() && reply.contains("choices") && !reply["choices"].empty()) {
        const json& msg = reply["choices"][0]["message"];
        if (msg.contains("content") && msg["content"].is_string()) return msg["content"].get<std::string>();
      }
      failure = "malformed response body";
    } else {
      failure = fmt::format("HTTP {}", res->status);
      retryable = res->status == 408 || res->status == 429 || res->status >= 500;
    }
    log += fmt::format("attempt {}: {}; ", attempt, failure);
    if (!retryable) break;
    if (attempt < cfg_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("chat completion failed: " + log);
}

}  // namespace licl
