#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "licl/domain.hpp"
#include "licl/llm_gateway.hpp"

namespace licl {

// Query text shared by every baseline prompt.
std::string start_position_text(const ProblemInstance& p);
std::string goal_position_text(const ProblemInstance& p);

// Chain-of-thought prompt; `examples` fills the example section (empty for
// zero-shot).
std::string cot_prompt(const ProblemInstance& p, std::string_view examples = {});
std::string react_prompt(const ProblemInstance& p);

struct BaselineOutcome {
  std::vector<Action> plan;
  std::string final_response;
  std::vector<std::string> diagnostics;
};

double similarity(int dq, int dc);

struct CorpusEntry {
  ProblemInstance problem;
  std::string trajectory;
  int distance = 0;
};

struct RetrievalCorpus {
  std::vector<CorpusEntry> entries;
  std::vector<std::size_t> pinned;  // indices used first in fixed mode

  void add(const ProblemInstance& p);
  void add(ProblemInstance p, std::string trajectory);
};

// Oracle solution written out the way a worked example reads.
std::string render_trajectory(const ProblemInstance& p);

enum class RetrievalMode { strict, generous, fixed };

std::string_view to_string(RetrievalMode m);
RetrievalMode retrieval_mode_from_string(std::string_view name);

std::vector<std::string> retrieve_examples(const ProblemInstance& query, const RetrievalCorpus& corpus,
                                           std::size_t budget_chars, RetrievalMode mode);

BaselineOutcome run_zero_shot(ChatClient& llm, const ProblemInstance& p, double temperature = 1.0);
BaselineOutcome run_rag(ChatClient& llm, const ProblemInstance& p, const RetrievalCorpus& corpus,
                        std::size_t budget_chars = 10000, RetrievalMode mode = RetrievalMode::generous);
BaselineOutcome run_self_consistency(ChatClient& llm, std::string_view prompt, int k = 5);
BaselineOutcome run_self_refine(ChatClient& llm, std::string_view prompt, int n = 5);
BaselineOutcome run_react(ChatClient& llm, const ProblemInstance& p);
BaselineOutcome run_react_oracle(ChatClient& llm, const ProblemInstance& p);

// Feedback for a plan that fails validation; nullopt when the plan succeeds.
std::optional<std::string> oracle_feedback(const ProblemInstance& p, const std::vector<Action>& plan);

struct ToTNode {
  std::string thought;
  std::vector<Action> action_prefix;
  int confidence = 0;
  bool is_terminal = false;
  std::optional<std::vector<Action>> final_plan;

  std::size_t plan_length() const { return final_plan ? final_plan->size() : action_prefix.size(); }
};

// Higher confidence first, then shorter plans.
bool tot_better(const ToTNode& a, const ToTNode& b);

// Candidates from a JSON array reply; `prefix` is prepended to each
// candidate's proposed actions, truncated to `max_actions`.
std::vector<ToTNode> parse_tot_candidates(std::string_view text, const std::vector<Action>& prefix,
                                          std::size_t max_actions, std::vector<std::string>* diagnostics = nullptr);

struct ToTParams {
  int breadth = 5;
  int depth = 3;
  int max_actions = 8;
};

std::string tot_prompt(const ProblemInstance& p, int depth, int max_depth, const ToTNode& node,
                       const std::vector<std::string>& thought_history);

BaselineOutcome run_tot(ChatClient& llm, const ProblemInstance& p, const ToTParams& params = {});

}  // namespace licl
