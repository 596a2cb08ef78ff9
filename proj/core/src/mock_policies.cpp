#include <algorithm>
#include <cstdlib>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "licl/baselines.hpp"
#include "licl/errors.hpp"
#include "licl/llm_gateway.hpp"
#include "licl/oracle.hpp"
#include "licl/problem_codec.hpp"
#include "licl/trace_codec.hpp"
#include "licl/value.hpp"

namespace licl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    out.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return out;
}

int manhattan(Coord a, Coord b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

std::string state_key(const PlanningState& s) { return render(state_to_value(s)); }

std::string optimal_key(const PlanningState& s, const ProblemInstance& p) {
  return state_key(s) + "|" + render(goal_to_value(p.goal, p.env));
}

std::vector<Action> believed_applicable(const PlanningState& s, const ProblemInstance& p, const WallBlindKnowledge& k) {
  if (const auto it = k.applicable.find(state_key(s)); it != k.applicable.end()) {
    try {
      return action_set_from_value(parse_value(it->second));
    } catch (const Error&) {
    }
  }
  std::vector<Action> out;
  if (const auto* g = std::get_if<GridState>(&s)) {
    const auto& spec = std::get<GridSpec>(p.env);
    for (Direction d : kDirections) {
      if (spec.in_bounds(step(g->agent, d))) out.push_back(Action::move(d));
    }
  } else if (const auto* so = std::get_if<SokobanState>(&s)) {
    const auto& spec = std::get<GridSpec>(p.env);
    for (Direction d : kDirections) {
      const Coord dest = step(so->agent, d);
      if (!spec.in_bounds(dest)) continue;
      if (dest == so->box) {
        if (spec.in_bounds(step(so->box, d))) out.push_back(Action::push(d));
      } else {
        out.push_back(Action::move(d));
      }
    }
  } else {
    const auto& b = std::get<BlocksState>(s);
    const auto& blocks = std::get<BlocksSpec>(p.env).blocks;
    for (Block x : b.clear) {
      if (b.on_table.count(x)) {
        for (Block y : blocks) {
          if (y != x) out.push_back(Action::t_to_b(x, y));
        }
        continue;
      }
      for (const auto& [upper, lower] : b.on) {
        if (upper != x) continue;
        out.push_back(Action::b_to_t(x, lower));
        for (Block y : blocks) {
          if (y != x && y != lower) out.push_back(Action::b_to_b(x, lower, y));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Action> believed_optimal(const PlanningState& s, const std::vector<Action>& applicable,
                                     const ProblemInstance& p, const WallBlindKnowledge& k) {
  if (const auto it = k.optimal.find(optimal_key(s, p)); it != k.optimal.end()) {
    try {
      return action_set_from_value(parse_value(it->second));
    } catch (const Error&) {
    }
  }
  std::vector<Action> out;
  const auto has = [&](const Action& a) { return std::find(applicable.begin(), applicable.end(), a) != applicable.end(); };
  if (const auto* g = std::get_if<GridState>(&s)) {
    const Coord goal = std::get<GridGoal>(p.goal).cell;
    for (const Action& a : applicable) {
      if (manhattan(step(g->agent, a.direction()), goal) < manhattan(g->agent, goal)) out.push_back(a);
    }
  } else if (const auto* so = std::get_if<SokobanState>(&s)) {
    const Coord target = std::get<SokobanGoal>(p.goal).box_target;
    if (so->box == target) return out;
    const Direction d = so->box.x != target.x ? (target.x > so->box.x ? Direction::east : Direction::west)
                                              : (target.y > so->box.y ? Direction::north : Direction::south);
    const Coord push_from = step(so->box, opposite(d));
    if (so->agent == push_from && has(Action::push(d))) return {Action::push(d)};
    for (const Action& a : applicable) {
      if (a.is_move() && manhattan(step(so->agent, a.direction()), push_from) < manhattan(so->agent, push_from)) {
        out.push_back(a);
      }
    }
  } else {
    for (const Action& a : get_recommended_actions(std::get<BlocksState>(s), std::get<BlocksGoal>(p.goal))) {
      if (has(a)) out.push_back(a);
    }
  }
  return out;
}

bool believed_goal(const PlanningState& s, const ProblemInstance& p) {
  if (const auto* g = std::get_if<GridState>(&s)) return g->agent == std::get<GridGoal>(p.goal).cell;
  if (const auto* so = std::get_if<SokobanState>(&s)) return so->box == std::get<SokobanGoal>(p.goal).box_target;
  return at_goal(s, p.goal);
}

std::optional<PlanningState> believed_apply(const PlanningState& s, const Action& a, const ProblemInstance& p) {
  if (const auto* g = std::get_if<GridState>(&s)) return GridState{step(g->agent, a.direction())};
  if (const auto* so = std::get_if<SokobanState>(&s)) {
    if (a.is_push()) return SokobanState{so->box, step(so->box, a.direction())};
    return SokobanState{step(so->agent, a.direction()), so->box};
  }
  try {
    return apply_action(s, a, p.env);
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct BelievedStep {
  PlanningState state;
  std::vector<Action> applicable;
  std::vector<Action> optimal;
  Action chosen;
  PlanningState next;
};

struct Rollout {
  std::vector<BelievedStep> steps;
  PlanningState final_state;
};

Rollout wall_blind_rollout(const ProblemInstance& p, const WallBlindKnowledge& k) {
  std::size_t limit = 64;
  if (const auto* spec = std::get_if<GridSpec>(&p.env)) limit = static_cast<std::size_t>(spec->cell_count());
  Rollout r{{}, p.initial};
  std::optional<Action> last;
  while (r.steps.size() < limit && !believed_goal(r.final_state, p)) {
    BelievedStep st{r.final_state, {}, {}, {}, r.final_state};
    st.applicable = believed_applicable(st.state, p, k);
    st.optimal = believed_optimal(st.state, st.applicable, p, k);
    std::optional<Action> pick;
    if (!st.optimal.empty()) {
      pick = st.optimal.front();
    } else {
      for (const Action& a : st.applicable) {
        if (last && !a.is_block() && !last->is_block() && a.direction() == opposite(last->direction())) continue;
        pick = a;
        break;
      }
      if (!pick && !st.applicable.empty()) pick = st.applicable.front();
    }
    if (!pick) break;
    st.chosen = *pick;
    const auto next = believed_apply(st.state, st.chosen, p);
    if (!next) break;
    st.next = *next;
    r.final_state = *next;
    last = pick;
    r.steps.push_back(std::move(st));
  }
  return r;
}

std::vector<Action> plan_of(const Rollout& r) {
  std::vector<Action> out;
  for (const auto& st : r.steps) out.push_back(st.chosen);
  return out;
}

std::string join_actions(const std::vector<Action>& plan) {
  std::string out;
  for (const auto& a : plan) out += (out.empty() ? "" : ", ") + to_string(a);
  return out;
}

}  // namespace

std::string_view to_string(MockPolicy p) { return p == MockPolicy::oracle_perfect ? "oracle_perfect" : "wall_blind"; }

MockPolicy mock_policy_from_string(std::string_view name) {
  if (name == "oracle_perfect" || name == "oracle-perfect") return MockPolicy::oracle_perfect;
  if (name == "wall_blind" || name == "wall-blind") return MockPolicy::wall_blind;
  throw Error(fmt::format("unknown mock policy '{}'", name));
}

PromptMode detect_prompt_mode(std::string_view prompt) {
  if (prompt.find("Selected candidate:") != std::string_view::npos) return PromptMode::tie_break;
  if (prompt.find("Return ONLY the JSON array") != std::string_view::npos) return PromptMode::tot_expand;
  if (prompt.find("ORACLE FEEDBACK:") != std::string_view::npos) return PromptMode::react_feedback;
  if (prompt.find("### Self-Refinement Attempt") != std::string_view::npos) return PromptMode::refine;
  if (prompt.find("PROGRAM:\n```python") != std::string_view::npos) return PromptMode::program_trace;
  return PromptMode::cot;
}

WallBlindKnowledge parse_prompt_knowledge(std::string_view prompt) {
  WallBlindKnowledge k;
  const auto lines = lines_of(prompt);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    std::string_view fn;
    for (std::string_view name : {"get_applicable_actions", "get_optimal_actions"}) {
      if (line.substr(0, 4) == ">>> " && line.substr(4, name.size()) == name && line.size() > 4 + name.size() &&
          line[4 + name.size()] == '(') {
        fn = name;
      }
    }
    if (fn.empty()) continue;
    std::string args(line.substr(5 + fn.size()));
    if (args.empty()) {
      while (++i < lines.size()) {
        std::string_view cont = trim(lines[i]);
        if (cont.substr(0, 3) != "...") break;
        cont = trim(cont.substr(3));
        if (cont == ")") break;
        args += (args.empty() ? "" : " ") + std::string(cont);
      }
    } else if (args.back() == ')') {
      args.pop_back();
    }
    if (i + 1 >= lines.size()) break;
    const std::string output(trim(lines[++i]));
    try {
      std::optional<Value> state, goal;
      for (const auto& a : parse_arguments(args)) {
        if (a.name == "state") state = a.value;
        if (a.name == "goal") goal = a.value;
      }
      if (!state) continue;
      parse_value(output);
      if (fn == "get_applicable_actions") {
        k.applicable[render(*state)] = output;
      } else if (goal) {
        k.optimal[render(*state) + "|" + render(*goal)] = output;
      }
    } catch (const Error&) {
    }
  }
  return k;
}

std::vector<Action> wall_blind_plan(const ProblemInstance& p, const WallBlindKnowledge& k) {
  return plan_of(wall_blind_rollout(p, k));
}

std::string wall_blind_trace(const ProblemInstance& p, const WallBlindKnowledge& k) {
  const Rollout r = wall_blind_rollout(p, k);
  const Value text_v = Value::string(serialize_problem(p));
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
  for (const auto& st : r.steps) {
    const Value sv = state_to_value(st.state);
    const Value app_v = actions_to_list(st.applicable);
    emit("at_goal", {sv, goal_v}, Value::boolean(false));
    emit("get_applicable_actions", {sv, goal_v}, app_v);
    if (blocks) {
      emit("get_recommended_actions", {sv, goal_v}, actions_to_list(st.optimal));
    } else {
      emit("get_optimal_actions", {sv, app_v, goal_v}, actions_to_list(st.optimal));
    }
    emit("apply_action", {sv, action_to_value(st.chosen), goal_v}, state_to_value(st.next));
  }
  emit("at_goal", {state_to_value(r.final_state), goal_v}, Value::boolean(believed_goal(r.final_state, p)));
  out += render_final_answer(plan_of(r));
  out += '\n';
  return out;
}

std::string render_cot_answer(const ProblemInstance& p, const std::vector<Action>& plan) {
  std::string out = fmt::format("Start: {}\nGoal: {}\n\n", start_position_text(p), goal_position_text(p));
  for (std::size_t i = 0; i < plan.size(); ++i) out += fmt::format("Step {}: {}\n", i + 1, to_string(plan[i]));
  out += fmt::format("\n**Final Action Sequence:** {}\n", join_actions(plan));
  return out;
}

MockClient::MockClient(MockPolicy policy, std::vector<ProblemInstance> problems) : policy_(policy) {
  add_problems(problems);
}

void MockClient::add_problems(const std::vector<ProblemInstance>& problems) {
  for (const auto& p : problems) {
    Entry e{p, {}};
    e.alternatives.push_back({python_quote(serialize_problem(p))});
    std::vector<std::string> baseline{fmt::format("Start: {}\nGoal: {}", start_position_text(p), goal_position_text(p))};
    if (is_grid_family(p.kind())) baseline.push_back(render_ascii(p.env, p.initial, p.goal));
    e.alternatives.push_back(std::move(baseline));
    entries_.push_back(std::move(e));
  }
}

std::string MockClient::model() const { return fmt::format("mock-{}", to_string(policy_)); }

const ProblemInstance* MockClient::locate(std::string_view prompt) const {
  const ProblemInstance* best = nullptr;
  std::size_t best_pos = 0;
  for (const auto& e : entries_) {
    for (const auto& alt : e.alternatives) {
      const auto pos = prompt.rfind(alt.front());
      if (pos == std::string_view::npos) continue;
      const bool all = std::all_of(alt.begin() + 1, alt.end(),
                                   [&](const std::string& s) { return prompt.find(s) != std::string_view::npos; });
      if (all && (!best || pos > best_pos)) {
        best = &e.problem;
        best_pos = pos;
      }
    }
  }
  return best;
}

std::string MockClient::do_complete(const CompletionRequest& req) {
  const PromptMode mode = detect_prompt_mode(req.prompt);
  if (mode == PromptMode::tie_break) return "Selected candidate: 1\n";
  const ProblemInstance* p = locate(req.prompt);
  if (!p) return "I could not identify the problem.\n";
  const WallBlindKnowledge k = parse_prompt_knowledge(req.prompt);
  const bool perfect = policy_ == MockPolicy::oracle_perfect;

  if (mode == PromptMode::program_trace) return perfect ? render_oracle_trace(*p) : wall_blind_trace(*p, k);

  const std::vector<Action> plan = perfect ? optimal_plan(*p) : wall_blind_plan(*p, k);
  if (mode == PromptMode::tot_expand) {
    std::vector<Action> prefix;
    const auto at = req.prompt.find("Actions chosen so far:");
    if (at != std::string::npos) {
      auto eol = req.prompt.find('\n', at);
      prefix = parse_action_sequence(std::string_view(req.prompt).substr(at + 22, eol - at - 22));
    }
    std::vector<Action> rest = plan;
    if (prefix.size() <= plan.size() && std::equal(prefix.begin(), prefix.end(), plan.begin())) {
      rest.assign(plan.begin() + static_cast<std::ptrdiff_t>(prefix.size()), plan.end());
    }
    const std::size_t take = std::min<std::size_t>(rest.size(), 8);
    std::vector<Action> proposed(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(take));
    const bool terminal = take == rest.size();
    nlohmann::json cand{{"thought", perfect ? "Follow the shortest route." : "Head straight for the goal."},
                        {"proposed_actions", nlohmann::json::array()},
                        {"confidence", perfect ? (terminal ? 100 : 90) : 60},
                        {"is_terminal", terminal}};
    for (const auto& a : proposed) cand["proposed_actions"].push_back(to_string(a));
    if (terminal) {
      std::vector<Action> full = prefix;
      full.insert(full.end(), proposed.begin(), proposed.end());
      cand["final_plan"] = nlohmann::json::array();
      for (const auto& a : full) cand["final_plan"].push_back(to_string(a));
    }
    return nlohmann::json::array({cand}).dump(2) + "\n";
  }
  if (mode == PromptMode::refine && perfect) return "**No further refinement needed.**\n\n" + render_cot_answer(*p, plan);
  return render_cot_answer(*p, plan);
}

}  // namespace licl
