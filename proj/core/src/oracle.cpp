#include "licl/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>

#include <fmt/core.h>

#include "licl/errors.hpp"
#include "licl/problem_codec.hpp"
#include "licl/trace_codec.hpp"

namespace licl {

DistanceField::DistanceField(const Environment& env, const Goal& goal) : indexer_(env) {
  validate_goal(goal, env);
  const std::size_t n = indexer_.size();
  dist_.assign(n, -1);
  std::vector<std::vector<std::uint32_t>> reverse(n);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!indexer_.valid(i)) continue;
    const PlanningState s = indexer_.state_at(i);
    if (at_goal(s, goal)) {
      dist_[i] = 0;
      queue.push_back(i);
    }
    for (const Action& a : applicable_actions(s, env)) {
      const auto j = indexer_.index_of(apply_action(s, a, env));
      reverse[*j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    ++reachable_;
    for (std::uint32_t i : reverse[j]) {
      if (dist_[i] < 0) {
        dist_[i] = dist_[j] + 1;
        queue.push_back(i);
      }
    }
  }
}

int DistanceField::distance(const PlanningState& s) const {
  const auto i = indexer_.index_of(s);
  return i ? dist_[*i] : -1;
}

std::shared_ptr<const DistanceField> distance_field(const Environment& env, const Goal& goal) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const DistanceField>> cache;
  std::string key = environment_to_json(env);
  key += '|';
  key += std::to_string(goal.index());
  key += render(goal_to_value(goal, env));
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto field = std::make_shared<const DistanceField>(env, goal);
  std::lock_guard lock(mu);
  if (cache.size() >= 4096) cache.clear();
  return cache.emplace(std::move(key), std::move(field)).first->second;
}

std::vector<Action> get_optimal_actions(const PlanningState& state, const Goal& goal, const Environment& env) {
  const auto field = distance_field(env, goal);
  validate_state(state, env);
  const int d = field->distance(state);
  if (d < 0) throw NoPlan("goal is unreachable from this state");
  std::vector<Action> out;
  if (d == 0) return out;
  for (const Action& a : applicable_actions(state, env)) {
    if (field->distance(apply_action(state, a, env)) == d - 1) out.push_back(a);
  }
  return out;
}

std::vector<Action> get_recommended_actions(const BlocksState& state, const BlocksGoal& goal) {
  const auto support = [&](Block b) -> std::optional<Block> {
    for (const auto& [u, l] : state.on) {
      if (u == b) return l;
    }
    return std::nullopt;
  };
  const auto goal_support = [&](Block b) -> std::optional<Block> {
    for (const auto& [u, l] : goal.on) {
      if (u == b) return l;
    }
    return std::nullopt;
  };
  std::map<Block, bool> memo;
  const auto well_placed = [&](auto&& self, Block b, int depth) -> bool {
    if (auto it = memo.find(b); it != memo.end()) return it->second;
    bool ok = false;
    const auto below = support(b);
    const auto want = goal_support(b);
    if (!below) {
      ok = !want;
    } else if (want && *want == *below && depth < 64) {
      ok = self(self, *below, depth + 1);
    }
    memo[b] = ok;
    return ok;
  };
  const auto wp = [&](Block b) { return well_placed(well_placed, b, 0); };

  std::vector<Action> out;
  for (const auto& [x, y] : state.on) {
    if (state.clear.count(x) && !wp(x)) out.push_back(Action::b_to_t(x, y));
  }
  if (out.empty()) {
    for (const auto& [x, y] : goal.on) {
      if (state.clear.count(x) && state.on_table.count(x) && state.clear.count(y) && wp(y)) {
        out.push_back(Action::t_to_b(x, y));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Action> optimal_plan(const ProblemInstance& p) {
  const auto field = distance_field(p.env, p.goal);
  PlanningState s = p.initial;
  int d = field->distance(s);
  if (d < 0) throw NoPlan(fmt::format("problem {} has no plan", p.id));
  std::vector<Action> plan;
  while (d > 0) {
    for (const Action& a : applicable_actions(s, p.env)) {
      PlanningState next = apply_action(s, a, p.env);
      if (field->distance(next) == d - 1) {
        plan.push_back(a);
        s = std::move(next);
        break;
      }
    }
    --d;
  }
  return plan;
}

int optimal_length(const ProblemInstance& p) {
  const int d = distance_field(p.env, p.goal)->distance(p.initial);
  if (d < 0) throw NoPlan(fmt::format("problem {} has no plan", p.id));
  return d;
}

std::vector<Action> oracle_rollout(const ProblemInstance& p) {
  if (p.kind() != DomainKind::blocksworld) return optimal_plan(p);
  const auto& goal = std::get<BlocksGoal>(p.goal);
  PlanningState s = p.initial;
  std::vector<Action> plan;
  const std::size_t cap = 4 * std::get<BlocksSpec>(p.env).blocks.size() + 4;
  while (!at_goal(s, p.goal)) {
    const auto rec = get_recommended_actions(std::get<BlocksState>(s), goal);
    if (rec.empty() || plan.size() > cap) throw NoPlan(fmt::format("recommendations stalled on {}", p.id));
    plan.push_back(rec.front());
    s = apply_action(s, rec.front(), p.env);
  }
  return plan;
}

std::vector<std::string> traced_subroutines(DomainKind kind) {
  return {"extract_problem",
          "extract_initial_state",
          "extract_goal",
          "at_goal",
          "get_applicable_actions",
          kind == DomainKind::blocksworld ? "get_recommended_actions" : "get_optimal_actions",
          "apply_action"};
}

std::string task_function_name(DomainKind kind) {
  switch (kind) {
    case DomainKind::full_sokoban: return "pddl_sokoban";
    case DomainKind::blocksworld: return "pddl_blocksworld";
    default: return "pddl_grid";
  }
}

namespace {

struct Bound {
  std::map<std::string, Value> named;
};

// Binds positional and keyword arguments to a subroutine's parameters.
Bound bind(std::string_view function, const std::vector<Argument>& args) {
  std::vector<std::string> params;
  if (function == "extract_problem") {
    params = {"input_str"};
  } else if (function == "extract_initial_state" || function == "extract_goal") {
    params = {"problem_str"};
  } else if (function == "at_goal" || function == "get_applicable_actions" || function == "get_recommended_actions") {
    params = {"state", "goal"};
  } else if (function == "get_optimal_actions") {
    const bool has_applicable = std::any_of(args.begin(), args.end(), [](const Argument& a) {
      return a.name == "applicable_actions";
    });
    std::size_t positional = 0;
    for (const auto& a : args) positional += a.name.empty() ? 1 : 0;
    params = has_applicable || positional >= 3 ? std::vector<std::string>{"state", "applicable_actions", "goal"}
                                               : std::vector<std::string>{"state", "goal"};
  } else if (function == "apply_action") {
    params = {"state", "action", "goal"};
  } else {
    throw OracleQueryError(fmt::format("unknown subroutine '{}'", function));
  }
  Bound b;
  std::size_t next = 0;
  for (const auto& a : args) {
    if (a.name.empty()) {
      if (next >= params.size()) throw OracleQueryError(fmt::format("too many arguments for {}", function));
      b.named[params[next++]] = a.value;
    } else {
      if (std::find(params.begin(), params.end(), a.name) == params.end()) {
        throw OracleQueryError(fmt::format("{} has no parameter '{}'", function, a.name));
      }
      b.named[a.name] = a.value;
    }
  }
  return b;
}

const Value& need(const Bound& b, const std::string& name, std::string_view function) {
  auto it = b.named.find(name);
  if (it == b.named.end()) throw OracleQueryError(fmt::format("{} is missing argument '{}'", function, name));
  return it->second;
}

const std::string& text_arg(const Bound& b, const std::string& name, std::string_view function) {
  const Value& v = need(b, name, function);
  if (!v.is(Value::Kind::string)) throw OracleQueryError(fmt::format("{} expects a string {}", function, name));
  return v.as_string();
}

PlanningState state_arg(const Bound& b, std::string_view function, const ProblemInstance& p) {
  return state_from_value(need(b, "state", function), p.env);
}

Goal goal_arg(const Bound& b, std::string_view function, const ProblemInstance& p) {
  auto it = b.named.find("goal");
  if (it == b.named.end()) return p.goal;
  (void)function;
  return goal_from_value(it->second, p.env);
}

template <typename F>
auto decoding(std::string_view function, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PreconditionViolation&) {
    throw;
  } catch (const OracleQueryError&) {
    throw;
  } catch (const Error& e) {
    throw OracleQueryError(fmt::format("{}: {}", function, e.what()));
  }
}

OracleAnswer action_answer(std::vector<Action> actions) {
  OracleAnswer a;
  a.kind = AnswerKind::action_set;
  a.value = actions_to_list(actions);
  a.correction = actions_to_set(actions);
  a.actions = std::move(actions);
  return a;
}

}  // namespace

OracleAnswer answer(std::string_view function, const std::vector<Argument>& args, const ProblemInstance& p) {
  const Bound b = bind(function, args);
  return decoding(function, [&]() -> OracleAnswer {
    OracleAnswer out;
    if (function == "extract_problem") {
      out.kind = AnswerKind::text;
      out.value = Value::string(parse_problem_header(text_arg(b, "input_str", function)).domain_name);
    } else if (function == "extract_initial_state") {
      out.kind = AnswerKind::state;
      out.value = state_to_value(parse_problem(text_arg(b, "problem_str", function), p.env).initial);
    } else if (function == "extract_goal") {
      out.kind = AnswerKind::goal;
      out.value = goal_to_value(parse_problem(text_arg(b, "problem_str", function), p.env).goal, p.env);
    } else if (function == "at_goal") {
      out.kind = AnswerKind::boolean;
      out.value = Value::boolean(at_goal(state_arg(b, function, p), goal_arg(b, function, p)));
    } else if (function == "get_applicable_actions") {
      out = action_answer(applicable_actions(state_arg(b, function, p), p.env));
    } else if (function == "get_optimal_actions") {
      if (p.kind() == DomainKind::blocksworld) {
        throw OracleQueryError("BlocksWorld traces use get_recommended_actions");
      }
      std::vector<Action> opt;
      try {
        opt = get_optimal_actions(state_arg(b, function, p), goal_arg(b, function, p), p.env);
      } catch (const NoPlan&) {
        // No action lies on an optimal plan when no plan exists.
      }
      out = action_answer(std::move(opt));
    } else if (function == "get_recommended_actions") {
      if (p.kind() != DomainKind::blocksworld) {
        throw OracleQueryError("get_recommended_actions is only traced for BlocksWorld");
      }
      const auto s = state_arg(b, function, p);
      const auto g = goal_arg(b, function, p);
      out = action_answer(get_recommended_actions(std::get<BlocksState>(s), std::get<BlocksGoal>(g)));
    } else {
      const auto s = state_arg(b, function, p);
      const Action a = action_from_value(need(b, "action", function));
      out.kind = AnswerKind::state;
      out.value = state_to_value(apply_action(s, a, p.env));
    }
    if (out.kind != AnswerKind::action_set) out.correction = out.value;
    return out;
  });
}

bool output_matches(const OracleAnswer& truth, const Value& output, const ProblemInstance& p) {
  try {
    switch (truth.kind) {
      case AnswerKind::text:
      case AnswerKind::boolean: return truth.value == output;
      case AnswerKind::state: return state_from_value(output, p.env) == state_from_value(truth.value, p.env);
      case AnswerKind::goal: return goal_from_value(output, p.env) == goal_from_value(truth.value, p.env);
      case AnswerKind::action_set: return action_set_from_value(output) == truth.actions;
    }
  } catch (const Error&) {
    return false;
  }
  return false;
}

std::string correction_input(std::string_view function, const std::vector<Argument>& args, const ProblemInstance& p) {
  const Bound b = bind(function, args);
  return decoding(function, [&]() -> std::string {
    if (function == "extract_problem") return "input_str=" + python_quote(text_arg(b, "input_str", function));
    if (function == "extract_initial_state" || function == "extract_goal") {
      return "problem_str=" + python_quote(text_arg(b, "problem_str", function));
    }
    const std::string state = render(state_to_value(state_arg(b, function, p)));
    const std::string goal = render(goal_to_value(goal_arg(b, function, p), p.env));
    if (function == "apply_action") {
      const Action a = action_from_value(need(b, "action", function));
      return fmt::format("state={}, action={}, goal={}", state, render(action_to_value(a)), goal);
    }
    return fmt::format("state={}, goal={}", state, goal);
  });
}

std::string render_oracle_trace(const ProblemInstance& p) {
  const std::string text = serialize_problem(p);
  const Value text_v = Value::string(text);
  const Value goal_v = goal_to_value(p.goal, p.env);
  const bool blocks = p.kind() == DomainKind::blocksworld;
  std::string out;
  const auto emit = [&](std::string_view name, const std::vector<Value>& args, const Value& result) {
    out += render_call(name, args, result);
    out += '\n';
  };
  emit("extract_problem", {text_v}, Value::string(p.domain_name));
  emit("extract_initial_state", {text_v}, state_to_value(p.initial));
  emit("extract_goal", {text_v}, goal_v);

  const std::vector<Action> plan = oracle_rollout(p);
  PlanningState s = p.initial;
  for (const Action& a : plan) {
    const Value sv = state_to_value(s);
    emit("at_goal", {sv, goal_v}, Value::boolean(false));
    const auto applicable = applicable_actions(s, p.env);
    const Value app_v = actions_to_list(applicable);
    emit("get_applicable_actions", {sv, goal_v}, app_v);
    if (blocks) {
      emit("get_recommended_actions", {sv, goal_v},
           actions_to_list(get_recommended_actions(std::get<BlocksState>(s), std::get<BlocksGoal>(p.goal))));
    } else {
      emit("get_optimal_actions", {sv, app_v, goal_v}, actions_to_list(get_optimal_actions(s, p.goal, p.env)));
    }
    s = apply_action(s, a, p.env);
    emit("apply_action", {sv, action_to_value(a), goal_v}, state_to_value(s));
  }
  emit("at_goal", {state_to_value(s), goal_v}, Value::boolean(true));
  out += render_final_answer(plan);
  out += '\n';
  return out;
}

}  // namespace licl
