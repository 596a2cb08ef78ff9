#include "licl/llm_gateway.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "licl/errors.hpp"
#include "licl/util.hpp"

namespace licl {

using nlohmann::json;

std::string ChatClient::complete(const CompletionRequest& req) {
  if (req.prompt.empty()) throw TransportError("empty prompt");
  if (req.temperature < 0) throw TransportError("negative temperature");
  if (req.prompt.size() > max_prompt_chars_) {
    throw PromptTooLarge(fmt::format("prompt has {} characters, limit is {}", req.prompt.size(), max_prompt_chars_));
  }
  calls_.fetch_add(1);
  return do_complete(req);
}

std::string ChatClient::complete(std::string prompt, double temperature, int max_tokens) {
  CompletionRequest req;
  req.prompt = std::move(prompt);
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  return complete(req);
}

std::optional<OpenAIConfig> OpenAIConfig::from_env() {
  const char* endpoint = std::getenv("LICL_ENDPOINT");
  if (!endpoint || !*endpoint) return std::nullopt;
  OpenAIConfig cfg;
  cfg.endpoint = endpoint;
  if (const char* key = std::getenv("LICL_API_KEY")) cfg.api_key = key;
  if (const char* model = std::getenv("LICL_MODEL")) cfg.model = model;
  if (const char* rpm = std::getenv("LICL_RPM")) cfg.requests_per_minute = std::atof(rpm);
  return cfg;
}

RecordingClient::RecordingClient(std::shared_ptr<ChatClient> inner, std::filesystem::path log_path)
    : inner_(std::move(inner)), path_(std::move(log_path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

std::string RecordingClient::do_complete(const CompletionRequest& req) {
  std::string response = inner_->complete(req);
  json rec{{"prompt_hash", fingerprint(req.prompt)},
           {"model", inner_->model()},
           {"temperature", req.temperature},
           {"max_tokens", req.max_tokens},
           {"tag", req.tag},
           {"prompt", req.prompt},
           {"response", response}};
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app);
  out << rec.dump() << '\n';
  if (!out) throw TransportError(fmt::format("cannot append to {}", path_.string()));
  return response;
}

ScriptedClient::ScriptedClient(std::string model_name) : model_(std::move(model_name)) {}

void ScriptedClient::add(std::string_view prompt, std::string response) {
  std::lock_guard lock(mu_);
  by_hash_[fingerprint(prompt)].push_back(std::move(response));
}

void ScriptedClient::push(std::string response) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(response));
}

void ScriptedClient::load_log(const std::filesystem::path& log_path) {
  std::ifstream in(log_path);
  if (!in) throw TransportError(fmt::format("cannot read {}", log_path.string()));
  std::lock_guard lock(mu_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    by_hash_[rec.at("prompt_hash").get<std::string>()].push_back(rec.at("response").get<std::string>());
  }
}

std::string ScriptedClient::do_complete(const CompletionRequest& req) {
  std::lock_guard lock(mu_);
  const auto it = by_hash_.find(fingerprint(req.prompt));
  if (it != by_hash_.end() && !it->second.empty()) {
    std::string r = std::move(it->second.front());
    it->second.pop_front();
    return r;
  }
  if (!queue_.empty()) {
    std::string r = std::move(queue_.front());
    queue_.pop_front();
    return r;
  }
  throw TransportError(fmt::format("no scripted response for prompt {}", fingerprint(req.prompt)));
}

}  // namespace licl
