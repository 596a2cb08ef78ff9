#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "licl/domain.hpp"

namespace licl {

struct CompletionRequest {
  std::string prompt;
  double temperature = 1.0;
  int max_tokens = 32000;
  std::string tag;  // free-form label written to request logs
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;

  // Counts the call, rejects oversized prompts, then delegates.
  std::string complete(const CompletionRequest& req);
  std::string complete(std::string prompt, double temperature, int max_tokens = 32000);

  virtual std::string model() const = 0;
  std::size_t call_count() const noexcept { return calls_.load(); }

  void set_max_prompt_chars(std::size_t n) noexcept { max_prompt_chars_ = n; }
  std::size_t max_prompt_chars() const noexcept { return max_prompt_chars_; }

 protected:
  virtual std::string do_complete(const CompletionRequest& req) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
  std::size_t max_prompt_chars_ = 1'000'000;
};

struct OpenAIConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model;
  double requests_per_minute = 60.0;  // <= 0 disables the limiter
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{600};
  std::map<std::string, std::string> options;  // extra request fields, JSON-encoded values

  // LICL_ENDPOINT, LICL_API_KEY, LICL_MODEL, LICL_RPM. Nullopt without an endpoint.
  static std::optional<OpenAIConfig> from_env();
};

// Chat-completions client for OpenAI-compatible servers.
class OpenAIClient final : public ChatClient {
 public:
  explicit OpenAIClient(OpenAIConfig cfg);
  std::string model() const override { return cfg_.model; }

 protected:
  std::string do_complete(const CompletionRequest& req) override;

 private:
  void admit();

  OpenAIConfig cfg_;
  std::mutex limiter_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

// Appends one JSON line per call (prompt hash, prompt, temperature, tag,
// response) and forwards to the wrapped client.
class RecordingClient final : public ChatClient {
 public:
  RecordingClient(std::shared_ptr<ChatClient> inner, std::filesystem::path log_path);
  std::string model() const override { return inner_->model(); }

 protected:
  std::string do_complete(const CompletionRequest& req) override;

 private:
  std::shared_ptr<ChatClient> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
};

// Replays responses keyed by prompt fingerprint; prompts without a recorded
// response are served from a FIFO queue, and a TransportError is raised
// when both are exhausted.
class ScriptedClient final : public ChatClient {
 public:
  explicit ScriptedClient(std::string model_name = "scripted");

  void add(std::string_view prompt, std::string response);
  void push(std::string response);
  // Adds every response from a RecordingClient log.
  void load_log(const std::filesystem::path& log_path);

  std::string model() const override { return model_; }

 protected:
  std::string do_complete(const CompletionRequest& req) override;

 private:
  std::string model_;
  std::mutex mu_;
  std::map<std::string, std::deque<std::string>> by_hash_;
  std::deque<std::string> queue_;
};

enum class MockPolicy { oracle_perfect, wall_blind };

std::string_view to_string(MockPolicy p);
MockPolicy mock_policy_from_string(std::string_view name);

// Which prompt family a request belongs to, detected from fixed markers.
enum class PromptMode { program_trace, cot, refine, react_feedback, tot_expand, tie_break };

PromptMode detect_prompt_mode(std::string_view prompt);

// Deterministic stand-in for a model. The problem a prompt asks about is
// found by locating each registered problem's query text; the one that
// occurs last in the prompt wins, so embedded examples are never mistaken
// for the query.
class MockClient final : public ChatClient {
 public:
  MockClient(MockPolicy policy, std::vector<ProblemInstance> problems);

  void add_problems(const std::vector<ProblemInstance>& problems);
  std::string model() const override;
  MockPolicy policy() const noexcept { return policy_; }

  // Problem the prompt is about; nullptr when none matches.
  const ProblemInstance* locate(std::string_view prompt) const;

 protected:
  std::string do_complete(const CompletionRequest& req) override;

 private:
  struct Entry {
    ProblemInstance problem;
    // Alternative query renderings. Every string of an alternative must
    // occur; the last occurrence of its first string is the match position.
    std::vector<std::vector<std::string>> alternatives;
  };
  MockPolicy policy_;
  std::vector<Entry> entries_;
};

// The wall-blind policy in isolation, for offline simulation. It believes
// every in-bounds move is applicable unless the prompt documents the state
// otherwise, and greedily reduces Manhattan distance to the goal. For
// BlocksWorld it ignores the destination-clear precondition.
struct WallBlindKnowledge {
  std::map<std::string, std::string> applicable;  // rendered state -> rendered action set
  std::map<std::string, std::string> optimal;     // "state|goal" -> rendered action set
};

WallBlindKnowledge parse_prompt_knowledge(std::string_view prompt);
std::vector<Action> wall_blind_plan(const ProblemInstance& p, const WallBlindKnowledge& k = {});
std::string wall_blind_trace(const ProblemInstance& p, const WallBlindKnowledge& k = {});

// Text a model would plausibly emit for a plan in chain-of-thought style.
std::string render_cot_answer(const ProblemInstance& p, const std::vector<Action>& plan);

}  // namespace licl
