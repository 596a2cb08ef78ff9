#include "licl/licl_engine.hpp"

#include <algorithm>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "licl/errors.hpp"
#include "licl/oracle.hpp"
#include "licl/util.hpp"
#include "licl/value.hpp"

namespace licl {

using nlohmann::json;

namespace {

FailureKind kind_for(std::string_view function) {
  if (function == "get_applicable_actions" || function == "apply_action") return FailureKind::validity;
  if (function == "get_optimal_actions" || function == "get_recommended_actions") return FailureKind::optimality;
  return FailureKind::other;
}

const Value* find_arg(const std::vector<Argument>& args, std::string_view name, std::size_t position) {
  for (const auto& a : args) {
    if (a.name == name) return &a.value;
  }
  std::size_t seen = 0;
  for (const auto& a : args) {
    if (!a.name.empty()) continue;
    if (seen++ == position) return &a.value;
  }
  return nullptr;
}

Correction make_correction(std::string_view function, const std::vector<Argument>& args, const ProblemInstance& p) {
  const OracleAnswer truth = answer(function, args, p);
  return {std::string(function), correction_input(function, args, p), render(truth.correction), p.id};
}

std::vector<Argument> state_goal_args(const PlanningState& s, const ProblemInstance& p) {
  return {{"state", state_to_value(s)}, {"goal", goal_to_value(p.goal, p.env)}};
}

// Judges one completed call; nullopt when it agrees with the oracle.
std::optional<Failure> judge(const SubroutineCall& call, std::size_t index, const ProblemInstance& p) {
  Failure f;
  f.index = index;
  f.function = call.name;
  f.kind = kind_for(call.name);
  if (!call.args) {
    f.kind = FailureKind::unparsable;
    f.diagnostic = fmt::format("call {} to {} has unparsable arguments", index, call.name);
    return f;
  }
  try {
    const OracleAnswer truth = answer(call.name, *call.args, p);
    if (call.output && output_matches(truth, *call.output, p)) return std::nullopt;
    f.correction = Correction{call.name, correction_input(call.name, *call.args, p), render(truth.correction), p.id};
    return f;
  } catch (const PreconditionViolation& e) {
    // The model applied an inapplicable action: teach the applicable set.
    std::vector<Argument> args;
    if (const Value* s = find_arg(*call.args, "state", 0)) args.push_back({"state", *s});
    if (const Value* g = find_arg(*call.args, "goal", 2)) args.push_back({"goal", *g});
    f.kind = FailureKind::validity;
    f.diagnostic = e.what();
    try {
      f.correction = make_correction("get_applicable_actions", args, p);
    } catch (const Error& inner) {
      f.kind = FailureKind::unparsable;
      f.diagnostic += std::string("; ") + inner.what();
    }
    return f;
  } catch (const Error& e) {
    f.kind = FailureKind::unparsable;
    f.diagnostic = fmt::format("call {} to {}: {}", index, call.name, e.what());
    return f;
  }
}

bool contains(const std::vector<Action>& v, const Action& a) { return std::find(v.begin(), v.end(), a) != v.end(); }

}  // namespace

std::string_view to_string(CorrectionPolicy p) {
  return p == CorrectionPolicy::validity_only_1 ? "validity_only_1" : "validity_plus_optimality_2";
}

CorrectionPolicy default_policy(DomainKind kind) {
  return kind == DomainKind::two_room || kind == DomainKind::maze ? CorrectionPolicy::validity_plus_optimality_2
                                                                  : CorrectionPolicy::validity_only_1;
}

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::validity: return "validity";
    case FailureKind::optimality: return "optimality";
    case FailureKind::other: return "other";
    case FailureKind::unparsable: return "unparsable";
  }
  return "other";
}

std::optional<Failure> first_failure(const Trace& trace, const ProblemInstance& p) {
  for (std::size_t i = 0; i < trace.calls.size(); ++i) {
    if (!trace.calls[i].complete()) continue;
    if (auto f = judge(trace.calls[i], i + 1, p)) return f;
  }
  return std::nullopt;
}

std::vector<Failure> localize(const Trace& trace, const ProblemInstance& p, CorrectionPolicy policy) {
  std::vector<Failure> out;
  bool have_optimality = false;
  for (std::size_t i = 0; i < trace.calls.size(); ++i) {
    if (!trace.calls[i].complete()) continue;
    auto f = judge(trace.calls[i], i + 1, p);
    if (!f) continue;
    if (policy == CorrectionPolicy::validity_plus_optimality_2 && f->kind == FailureKind::optimality) {
      if (!have_optimality) {
        have_optimality = true;
        out.push_back(std::move(*f));
      }
      continue;
    }
    out.push_back(std::move(*f));
    break;
  }
  if (policy == CorrectionPolicy::validity_only_1 && out.size() > 1) out.resize(1);
  return out;
}

StepEvalResult step_eval(const ProblemInstance& p, const std::vector<Action>& actions, CorrectionPolicy policy) {
  StepEvalResult r;
  PlanningState s = p.initial;
  const bool blocks = p.kind() == DomainKind::blocksworld;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    ++r.steps_judged;
    const Action& a = actions[i];
    const auto applicable = applicable_actions(s, p.env);
    if (!contains(applicable, a)) {
      r.first_invalid = i + 1;
      r.corrections.push_back(make_correction("get_applicable_actions", state_goal_args(s, p), p));
      break;
    }
    if (!r.first_suboptimal) {
      std::vector<Action> optimal;
      try {
        optimal = get_optimal_actions(s, p.goal, p.env);
      } catch (const NoPlan&) {
      }
      if (!contains(optimal, a)) {
        r.first_suboptimal = i + 1;
        if (policy == CorrectionPolicy::validity_plus_optimality_2) {
          r.corrections.push_back(
              make_correction(blocks ? "get_recommended_actions" : "get_optimal_actions", state_goal_args(s, p), p));
        }
      }
    }
    s = apply_action(s, a, p.env);
  }
  r.goal_reached = !r.first_invalid && at_goal(s, p.goal);
  r.end_state = s;
  return r;
}

std::vector<Action> extract_plan(const Trace& trace, std::string_view response) {
  if (trace.final_answer) return *trace.final_answer;
  std::vector<Action> applied;
  for (const auto& call : trace.calls) {
    if (call.name != "apply_action" || !call.args) continue;
    const Value* a = find_arg(*call.args, "action", 1);
    if (!a) continue;
    try {
      applied.push_back(action_from_value(*a));
    } catch (const Error&) {
    }
  }
  if (!applied.empty()) return applied;
  return parse_action_sequence(response);
}

std::string TrainLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    json j{{"problem_id", r.problem_id},
           {"batch", r.batch},
           {"prompt_chars", r.prompt_chars},
           {"trace_hash", r.trace_hash},
           {"source", r.source},
           {"failure_kind", r.failure_kind},
           {"failure_index", r.failure_index ? json(*r.failure_index) : json(nullptr)},
           {"correction_keys", r.correction_keys},
           {"diagnostic", r.diagnostic}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

TrainLog TrainLog::from_jsonl(std::string_view text) {
  TrainLog log;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const json j = json::parse(line);
    TrainRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.batch = j.value("batch", std::size_t{0});
    r.prompt_chars = j.at("prompt_chars").get<std::size_t>();
    r.trace_hash = j.value("trace_hash", std::string{});
    r.source = j.value("source", std::string{});
    r.failure_kind = j.value("failure_kind", std::string{});
    if (j.contains("failure_index") && !j["failure_index"].is_null()) r.failure_index = j["failure_index"].get<std::size_t>();
    r.correction_keys = j.value("correction_keys", std::vector<std::string>{});
    r.diagnostic = j.value("diagnostic", std::string{});
    log.records.push_back(std::move(r));
  }
  return log;
}

TrainResult train(const PartialProgram& base, const std::vector<ProblemInstance>& problems, ChatClient& llm,
                  const TrainConfig& cfg, const FlushCallback& on_flush) {
  if (cfg.batch_flush == 0) throw Error("batch_flush must be at least 1");
  const CorrectionPolicy policy = cfg.policy.value_or(default_policy(base.kind));
  const std::size_t n = std::min(problems.size(), cfg.max_training_problems);

  TrainResult result{base, {}, {}};
  std::vector<Correction> pending;
  if (on_flush) on_flush(0, result.program);

  for (std::size_t i = 0; i < n; ++i) {
    const ProblemInstance& p = problems[i];
    TrainRecord rec;
    rec.problem_id = p.id;
    rec.batch = i / cfg.batch_flush;
    try {
      CompletionRequest req;
      req.prompt = licl_prompt(result.program, p, cfg.ascii_grid);
      req.temperature = cfg.temperature;
      req.max_tokens = cfg.max_tokens;
      req.tag = "licl-train:" + p.id;
      rec.prompt_chars = req.prompt.size();
      const std::string response = llm.complete(req);
      rec.trace_hash = fingerprint(response);
      const Trace trace = parse_trace(response);
      const bool has_calls = std::any_of(trace.calls.begin(), trace.calls.end(),
                                         [](const SubroutineCall& c) { return c.complete(); });
      std::vector<Correction> found;
      if (has_calls) {
        rec.source = "trace";
        const auto failures = localize(trace, p, policy);
        for (const auto& f : failures) {
          if (rec.failure_kind.empty()) {
            rec.failure_kind = std::string(to_string(f.kind));
            rec.failure_index = f.index;
          }
          if (f.correction) {
            found.push_back(*f.correction);
          } else if (!f.diagnostic.empty()) {
            rec.diagnostic += (rec.diagnostic.empty() ? "" : "; ") + f.diagnostic;
          }
        }
      } else {
        const auto plan = extract_plan(trace, response);
        if (plan.empty()) {
          rec.source = "none";
          rec.diagnostic = "no parseable trace or plan";
        } else {
          rec.source = "plan";
          const StepEvalResult se = step_eval(p, plan, policy);
          if (se.first_invalid) {
            rec.failure_kind = "validity";
            rec.failure_index = se.first_invalid;
          } else if (se.first_suboptimal) {
            rec.failure_kind = "optimality";
            rec.failure_index = se.first_suboptimal;
          }
          found = se.corrections;
        }
      }
      for (auto& c : found) {
        if (!result.program.find(c.function)) {
          rec.diagnostic += (rec.diagnostic.empty() ? "" : "; ") + fmt::format("dropped correction for {}", c.function);
          continue;
        }
        rec.correction_keys.push_back(c.key());
        result.corrections.push_back(c);
        pending.push_back(std::move(c));
      }
    } catch (const Error& e) {
      rec.source = "skipped";
      rec.diagnostic = e.what();
    }
    result.log.records.push_back(std::move(rec));

    if ((i + 1) % cfg.batch_flush == 0 || i + 1 == n) {
      result.program = insert_corrections(result.program, pending);
      pending.clear();
      if (on_flush) on_flush(i + 1, result.program);
    }
  }
  return result;
}

}  // namespace licl
