#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "licl/domain.hpp"
#include "licl/llm_gateway.hpp"
#include "licl/prompt_forge.hpp"
#include "licl/trace_codec.hpp"

namespace licl {

enum class CorrectionPolicy { validity_only_1, validity_plus_optimality_2 };

std::string_view to_string(CorrectionPolicy p);
// Grids allow one validity and one optimality correction per problem.
CorrectionPolicy default_policy(DomainKind kind);

enum class FailureKind { validity, optimality, other, unparsable };

std::string_view to_string(FailureKind k);

struct Failure {
  std::size_t index = 0;  // 1-based call index, or 1-based step for plans
  FailureKind kind = FailureKind::other;
  std::string function;
  std::optional<Correction> correction;  // absent when the call cannot be decoded
  std::string diagnostic;
};

// The minimum-index call whose output differs from the oracle's.
std::optional<Failure> first_failure(const Trace& trace, const ProblemInstance& p);

// Failures to learn from under a policy. The single-correction policy keeps
// only the first failure. The two-correction policy keeps the first
// optimality failure (if it comes first) plus the first failure of any
// other kind, then stops.
std::vector<Failure> localize(const Trace& trace, const ProblemInstance& p, CorrectionPolicy policy);

struct StepEvalResult {
  std::optional<std::size_t> first_invalid;     // 1-based step
  std::optional<std::size_t> first_suboptimal;  // 1-based step
  std::vector<Correction> corrections;
  bool goal_reached = false;
  PlanningState end_state;
  std::size_t steps_judged = 0;
};

// Simulates a plan, stopping at the first inapplicable action. Under the
// single-correction policy only validity corrections are emitted.
StepEvalResult step_eval(const ProblemInstance& p, const std::vector<Action>& actions,
                         CorrectionPolicy policy = CorrectionPolicy::validity_plus_optimality_2);

// Plan from a model response: the trace's final answer, else the actions of
// its apply_action calls, else free-text extraction.
std::vector<Action> extract_plan(const Trace& trace, std::string_view response);

struct TrainConfig {
  std::size_t max_training_problems = 240;
  std::size_t batch_flush = 10;
  std::optional<CorrectionPolicy> policy;  // default_policy(kind) when unset
  double temperature = 1.0;
  int max_tokens = 32000;
  bool ascii_grid = true;
};

struct TrainRecord {
  std::string problem_id;
  std::size_t batch = 0;
  std::size_t prompt_chars = 0;
  std::string trace_hash;
  std::string source;  // trace, plan, none, skipped
  std::string failure_kind;
  std::optional<std::size_t> failure_index;
  std::vector<std::string> correction_keys;
  std::string diagnostic;
};

struct TrainLog {
  std::vector<TrainRecord> records;

  std::string to_jsonl() const;
  static TrainLog from_jsonl(std::string_view text);
};

struct TrainResult {
  PartialProgram program;
  std::vector<Correction> corrections;  // every extracted correction, in order
  TrainLog log;
};

// Called with the number of problems processed and the program in force
// after each flush (and once with 0 before training starts).
using FlushCallback = std::function<void(std::size_t, const PartialProgram&)>;

TrainResult train(const PartialProgram& base, const std::vector<ProblemInstance>& problems, ChatClient& llm,
                  const TrainConfig& cfg, const FlushCallback& on_flush = {});

}  // namespace licl
