#include "licl/baselines.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "licl/errors.hpp"
#include "licl/eval_metrics.hpp"
#include "licl/oracle.hpp"
#include "licl/prompt_forge.hpp"
#include "licl/trace_codec.hpp"
#include "licl/value.hpp"

namespace licl {

using nlohmann::json;

namespace {

constexpr std::string_view kGridCot = R"(You are an expert at navigating gridworld environments. You will 
solve navigation problems where an agent must find the optimal 
path from a start position to a goal position while avoiding 
walls and obstacles.

IMPORTANT:
You are an agent navigating a {grid_size} gridworld.
The grid has {num_walls} walls that block movement.

**Grid Layout:**
{ascii_grid}

# Task Description

In each problem, you are given:
- A gridworld of specific dimensions
- A start position (row, column)
- A goal position (row, column)
- Wall locations that block movement

Your task is to find the shortest path from start to goal using 
these actions:
- **move-north**: Move one cell north (increase row by 1)
- **move-south**: Move one cell south (decrease row by 1)
- **move-east**: Move one cell east (increase column by 1)
- **move-west**: Move one cell west (decrease column by 1)

# Solution Strategy

For each problem, follow this reasoning process:

1. **Analyze the Grid**: Identify the start position, goal 
   position, and obstacles
2. **Plan the Route**: Determine if a direct path exists or if 
   you need to navigate around obstacles
3. **Step-by-Step Reasoning**: For each move, explain why it 
   brings you closer to the goal
4. **Verify the Path**: Ensure the path is valid and optimal

)";

constexpr std::string_view kSokobanCot = R"(You are an expert at solving Sokoban puzzles. You will 
solve puzzles where an agent must push a box from its start 
cell onto a target cell while avoiding walls.

IMPORTANT:
You are an agent navigating a {grid_size} gridworld.
The grid has {num_walls} walls that block movement.

**Grid Layout:**
{ascii_grid}

# Task Description

In each problem, you are given:
- A gridworld of specific dimensions
- The agent and box positions (x, y)
- The box target position (x, y)
- Wall locations that block movement

Your task is to find the shortest plan that places the box on 
its target using these actions:
- **move-north**: Move one cell north (increase y by 1)
- **move-south**: Move one cell south (decrease y by 1)
- **move-east**: Move one cell east (increase x by 1)
- **move-west**: Move one cell west (decrease x by 1)
- **push-north** / **push-south** / **push-east** / **push-west**: 
  Step into the adjacent box, pushing it one cell further

# Solution Strategy

For each problem, follow this reasoning process:

1. **Analyze the Grid**: Identify the agent, box, target, and 
   obstacles
2. **Plan the Route**: Decide from which side the box must be 
   pushed, and avoid pushing it into corners
3. **Step-by-Step Reasoning**: For each action, explain why it 
   brings the box closer to the target
4. **Verify the Plan**: Ensure the plan is valid and optimal

)";

constexpr std::string_view kBlocksCot = R"(You are an expert at solving Blocks World problems. You will 
solve problems where stacks of blocks must be rearranged into 
a goal configuration.

# Task Description

In each problem, you are given:
- The current on / on-table / clear relations
- The goal on relations

Your task is to find the shortest plan reaching the goal using 
these actions:
- **move-b-to-b(X, Y, Z)**: Move clear block X from block Y 
  onto clear block Z
- **move-b-to-t(X, Y)**: Move clear block X from block Y onto 
  the table
- **move-t-to-b(X, Z)**: Move clear block X from the table onto 
  clear block Z

# Solution Strategy

For each problem, follow this reasoning process:

1. **Analyze the State**: Identify misplaced blocks
2. **Plan the Moves**: Decide which blocks must be unstacked 
   and in which order stacks are rebuilt
3. **Step-by-Step Reasoning**: For each move, explain why it 
   brings you closer to the goal
4. **Verify the Plan**: Ensure the plan is valid and optimal

)";

constexpr std::string_view kCotTail = R"(# Example Problems

{examples}

# Problem to Solve

Start: {start_position}
Goal: {goal_position}

{deadzone_warning}

Please solve this problem step-by-step and provide your answer.

**Your Solution:**

First, provide your step-by-step reasoning:
1. Identify the start position, goal position, and any obstacles
2. Reason through each step of your path
3. Verify your path is valid and optimal

Then, provide your final answer EXACTLY in this format:

**Final Action Sequence:** move-direction1, move-direction2, ...

IMPORTANT: You MUST include the line starting with 
"Final Action Sequence:" followed by your comma-separated list 
of actions.)";

constexpr std::string_view kReactHead = R"(You are an expert gridworld planner. Solve using ReAct style 
trace.

)";

constexpr std::string_view kGridLayout = R"(IMPORTANT:
You are an agent navigating a {grid_size} gridworld.
The grid has {num_walls} walls that block movement.

**Grid Layout:**
{ascii_grid}

)";

constexpr std::string_view kReactGridActions = R"(## Valid Actions
- **move-north**: Move one cell up (increase y by 1)
- **move-south**: Move one cell down (decrease y by 1)
- **move-east**: Move one cell right (increase x by 1)
- **move-west**: Move one cell left (decrease x by 1)

## Movement Constraints
- You cannot move through walls
- You cannot move outside the grid boundaries
- Each action moves exactly one cell

)";

constexpr std::string_view kReactSokobanActions = R"(## Valid Actions
- **move-north**: Move one cell up (increase y by 1)
- **move-south**: Move one cell down (decrease y by 1)
- **move-east**: Move one cell right (increase x by 1)
- **move-west**: Move one cell left (decrease x by 1)
- **push-north** / **push-south** / **push-east** / **push-west**: 
  Step into the adjacent box, pushing it one cell further

## Movement Constraints
- You cannot move through walls
- You cannot move outside the grid boundaries
- A box cannot be pushed into a wall or off the grid

)";

constexpr std::string_view kReactBlocksActions = R"(## Valid Actions
- **move-b-to-b(X, Y, Z)**: Move clear block X from block Y onto clear block Z
- **move-b-to-t(X, Y)**: Move clear block X from block Y onto the table
- **move-t-to-b(X, Z)**: Move clear block X from the table onto clear block Z

## Movement Constraints
- Only clear blocks can be moved
- A block can only be placed on a clear block or the table

)";

constexpr std::string_view kReactTail = R"(# Example

Start: (2,1), Goal: (5,4)

Thought: I am at (2,1) and need to reach (5,4). I should move 
north and east while checking for obstacles.
Action: move-north
Thought: Now at (2,2). Continue moving toward the goal.
Action: move-north
...
Final Thought: Reached the goal at (5,4).
**Final Action Sequence:** move-north, move-north, move-east, ...

# Problem to Solve

Start: {start_position}
Goal: {goal_position}

Guidelines:
- Alternate between `Thought:` and `Action:`
- Keep moves consistent with grid layout
- Avoid illegal steps (walls, boundaries)
- End with `Final Thought:` and `**Final Action Sequence:**`)";

constexpr std::string_view kSelfConsistency = R"(

<!-- Self-Consistency Sample {k}/{total}: Treat this run 
independently and produce a complete plan -->)";

constexpr std::string_view kRefine = R"(

### Self-Refinement Attempt {attempt_number}
You previously produced the following reasoning and plan:

{previous_response}

Proposed action sequence: {previous_actions}

Carefully re-read the task description and your earlier steps. 
Without running code or simulations, check for potential 
mistakes:
- Did any move leave the grid or pass through a wall?
- Does the sequence actually reach the goal cell?
- Is there a shorter valid route?

If issues are found, explain them briefly and provide a 
corrected plan. If you believe the plan is correct and needs 
no further refinement, explicitly state:
'**No further refinement needed.**' and then restate the 
action sequence.

Always finish with a line of the form:
**Final Action Sequence:** move-*, move-*, ...

Refined solution:)";

constexpr std::string_view kTieBreak = R"(

Several candidate plans received the same number of votes. Each 
candidate is listed below with its self-critique.

{candidates}
Compare the candidates and reply with one line of the form
Selected candidate: N)";

constexpr std::string_view kFeedback = R"({original_prompt}

---

Your previous response:
{previous_response}

---

{feedback})";

constexpr std::string_view kToT = R"({reference_examples}

Gridworld planning problem:
Start: {start_position}
Goal: {goal_position}

Current depth: {depth}/{max_depth}
Actions chosen so far: {action_prefix}
Thoughts considered so far:
{thought_history}

Generate up to 5 candidate expansions as JSON. Each must include:
  - "thought": a short description of the idea
  - "proposed_actions": list of up to 8 moves continuing the plan
  - "confidence": integer 0-100 for promise of success
  - "is_terminal": true if plan should stop after these actions
  - "final_plan": optional full action list if terminal

Moves must stay within bounds and avoid walls.

Return ONLY the JSON array; no commentary.)";

constexpr std::string_view kToTClose = R"(

Partial plan under consideration: {action_prefix}
Complete this plan from the start position and give the full 
action sequence.)";

constexpr std::string_view kNoRefinement = "**No further refinement needed.**";

std::string join_actions(const std::vector<Action>& plan, std::string_view empty = "") {
  if (plan.empty()) return std::string(empty);
  std::string out;
  for (const auto& a : plan) out += (out.empty() ? "" : ", ") + to_string(a);
  return out;
}

std::map<std::string, std::string> layout_vars(const ProblemInstance& p) {
  std::map<std::string, std::string> vars{{"start_position", start_position_text(p)},
                                          {"goal_position", goal_position_text(p)}};
  if (const auto* g = std::get_if<GridSpec>(&p.env)) {
    vars["grid_size"] = fmt::format("{}x{}", g->width(), g->height());
    vars["num_walls"] = std::to_string(g->wall_count());
    vars["ascii_grid"] = render_ascii(p.env, p.initial, p.goal);
  }
  return vars;
}

std::string position_of(const PlanningState& s) {
  if (const auto* g = std::get_if<GridState>(&s)) return to_string(g->agent);
  if (const auto* so = std::get_if<SokobanState>(&s)) return to_string(so->agent);
  return render(state_to_value(s));
}

std::string critique_of(const std::string& sample) {
  static const std::regex marker("self-critique", std::regex::icase);
  std::smatch m;
  if (std::regex_search(sample, m, marker)) return sample.substr(static_cast<std::size_t>(m.position(0)));
  return sample;
}

BaselineOutcome single_call(ChatClient& llm, std::string prompt, double temperature, std::string tag) {
  CompletionRequest req{std::move(prompt), temperature, 32000, std::move(tag)};
  BaselineOutcome out;
  out.final_response = llm.complete(req);
  out.plan = parse_action_sequence(out.final_response);
  if (out.plan.empty()) out.diagnostics.push_back("no action sequence in response");
  return out;
}

}  // namespace

std::string start_position_text(const ProblemInstance& p) {
  if (const auto* g = std::get_if<GridState>(&p.initial)) return to_string(g->agent);
  if (const auto* s = std::get_if<SokobanState>(&p.initial)) {
    return fmt::format("agent {}, box {}", to_string(s->agent), to_string(s->box));
  }
  return render(state_to_value(p.initial));
}

std::string goal_position_text(const ProblemInstance& p) {
  if (const auto* g = std::get_if<GridGoal>(&p.goal)) return to_string(g->cell);
  if (const auto* s = std::get_if<SokobanGoal>(&p.goal)) return fmt::format("box on {}", to_string(s->box_target));
  return render(goal_to_value(p.goal, p.env));
}

std::string cot_prompt(const ProblemInstance& p, std::string_view examples) {
  std::string tmpl;
  switch (p.kind()) {
    case DomainKind::full_sokoban: tmpl = kSokobanCot; break;
    case DomainKind::blocksworld: tmpl = kBlocksCot; break;
    default: tmpl = kGridCot; break;
  }
  tmpl += kCotTail;
  auto vars = layout_vars(p);
  vars["examples"] = std::string(examples);
  vars["deadzone_warning"] = "";
  return fill_template(tmpl, vars);
}

std::string react_prompt(const ProblemInstance& p) {
  std::string tmpl(kReactHead);
  if (is_grid_family(p.kind())) tmpl += kGridLayout;
  switch (p.kind()) {
    case DomainKind::full_sokoban: tmpl += kReactSokobanActions; break;
    case DomainKind::blocksworld: tmpl += kReactBlocksActions; break;
    default: tmpl += kReactGridActions; break;
  }
  tmpl += kReactTail;
  return fill_template(tmpl, layout_vars(p));
}

double similarity(int dq, int dc) { return 1.0 / (1.0 + std::abs(dq - dc)); }

void RetrievalCorpus::add(const ProblemInstance& p) { add(p, render_trajectory(p)); }

void RetrievalCorpus::add(ProblemInstance p, std::string trajectory) {
  const int d = start_goal_distance(p);
  entries.push_back({std::move(p), std::move(trajectory), d});
}

std::string render_trajectory(const ProblemInstance& p) {
  std::string out;
  if (is_grid_family(p.kind())) out = "**Grid Layout:**\n" + render_ascii(p.env, p.initial, p.goal) + "\n";
  return out + render_cot_answer(p, optimal_plan(p));
}

std::string_view to_string(RetrievalMode m) {
  switch (m) {
    case RetrievalMode::strict: return "strict";
    case RetrievalMode::generous: return "generous";
    case RetrievalMode::fixed: return "fixed";
  }
  return "generous";
}

RetrievalMode retrieval_mode_from_string(std::string_view name) {
  for (auto m : {RetrievalMode::strict, RetrievalMode::generous, RetrievalMode::fixed}) {
    if (to_string(m) == name) return m;
  }
  throw Error(fmt::format("unknown retrieval mode '{}'", name));
}

std::vector<std::string> retrieve_examples(const ProblemInstance& query, const RetrievalCorpus& corpus,
                                           std::size_t budget_chars, RetrievalMode mode) {
  if (budget_chars == 0) throw Error("retrieval budget must be positive");
  std::vector<std::string> out;
  if (corpus.entries.empty()) return out;
  const int dq = start_goal_distance(query);
  std::size_t used = 0;
  std::vector<bool> taken(corpus.entries.size(), false);
  if (mode == RetrievalMode::fixed) {
    for (std::size_t i : corpus.pinned) {
      if (i >= corpus.entries.size() || taken[i]) continue;
      taken[i] = true;
      used += corpus.entries[i].trajectory.size();
      out.push_back(corpus.entries[i].trajectory);
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    if (!taken[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return similarity(dq, corpus.entries[a].distance) > similarity(dq, corpus.entries[b].distance);
  });
  for (std::size_t i : order) {
    const std::size_t size = corpus.entries[i].trajectory.size();
    if (mode == RetrievalMode::generous) {
      if (used > budget_chars) break;
    } else if (used + size > budget_chars) {
      break;
    }
    used += size;
    out.push_back(corpus.entries[i].trajectory);
  }
  return out;
}

BaselineOutcome run_zero_shot(ChatClient& llm, const ProblemInstance& p, double temperature) {
  return single_call(llm, cot_prompt(p), temperature, "zero_shot:" + p.id);
}

BaselineOutcome run_rag(ChatClient& llm, const ProblemInstance& p, const RetrievalCorpus& corpus,
                        std::size_t budget_chars, RetrievalMode mode) {
  std::string examples;
  for (const auto& e : retrieve_examples(p, corpus, budget_chars, mode)) {
    examples += (examples.empty() ? "" : "\n") + e;
  }
  return single_call(llm, cot_prompt(p, examples), 1.0, "rag:" + p.id);
}

BaselineOutcome run_self_consistency(ChatClient& llm, std::string_view prompt, int k) {
  if (k < 1) throw Error("self-consistency needs at least one sample");
  BaselineOutcome out;
  std::vector<std::string> samples;
  std::vector<std::vector<Action>> plans;
  for (int i = 1; i <= k; ++i) {
    const std::string annotated =
        std::string(prompt) + fill_template(kSelfConsistency, {{"k", std::to_string(i)}, {"total", std::to_string(k)}});
    samples.push_back(llm.complete(CompletionRequest{annotated, 1.0, 32000, fmt::format("sc:{}/{}", i, k)}));
    plans.push_back(parse_action_sequence(samples.back()));
  }
  // Distinct plans in first-sampled order with their vote counts.
  std::vector<std::size_t> firsts;
  std::vector<int> votes;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (plans[i].empty()) continue;
    bool found = false;
    for (std::size_t j = 0; j < firsts.size(); ++j) {
      if (plans[firsts[j]] == plans[i]) {
        ++votes[j];
        found = true;
        break;
      }
    }
    if (!found) {
      firsts.push_back(i);
      votes.push_back(1);
    }
  }
  if (firsts.empty()) {
    out.diagnostics.push_back("no sample produced a parseable plan");
    out.final_response = samples.back();
    return out;
  }
  const int best = *std::max_element(votes.begin(), votes.end());
  std::vector<std::size_t> tied;
  for (std::size_t j = 0; j < firsts.size(); ++j) {
    if (votes[j] == best) tied.push_back(firsts[j]);
  }
  std::size_t winner = tied.front();
  out.final_response = samples[winner];
  if (tied.size() > 1) {
    std::string candidates;
    for (std::size_t c = 0; c < tied.size(); ++c) {
      candidates += fmt::format("Candidate {}:\n{}\nPlan: {}\n\n", c + 1, critique_of(samples[tied[c]]),
                                join_actions(plans[tied[c]]));
    }
    const std::string reply = llm.complete(CompletionRequest{
        std::string(prompt) + fill_template(kTieBreak, {{"candidates", candidates}}), 1.0, 32000, "sc:tie-break"});
    static const std::regex pick(R"(Selected candidate:\s*(\d+))");
    std::smatch m;
    if (std::regex_search(reply, m, pick)) {
      const auto n = static_cast<std::size_t>(std::stoul(m[1].str()));
      if (n >= 1 && n <= tied.size()) winner = tied[n - 1];
    } else {
      out.diagnostics.push_back("tie-break reply named no candidate; first sample wins");
    }
  }
  out.plan = plans[winner];
  return out;
}

BaselineOutcome run_self_refine(ChatClient& llm, std::string_view prompt, int n) {
  if (n < 1) throw Error("self-refine needs at least one round");
  BaselineOutcome out;
  std::string response = llm.complete(CompletionRequest{std::string(prompt), 1.0, 32000, "sr:0"});
  std::vector<Action> current = parse_action_sequence(response);
  out.plan = current;
  for (int round = 1; round <= n; ++round) {
    const std::string refine = std::string(prompt) + fill_template(kRefine, {{"attempt_number", std::to_string(round)},
                                                                           {"previous_response", response},
                                                                           {"previous_actions", join_actions(current, "(none)")}});
    response = llm.complete(CompletionRequest{refine, 1.0, 32000, fmt::format("sr:{}", round)});
    current = parse_action_sequence(response);
    if (!current.empty()) out.plan = current;
    if (response.find(kNoRefinement) != std::string::npos) break;
  }
  out.final_response = response;
  if (out.plan.empty()) out.diagnostics.push_back("no round produced a parseable plan");
  return out;
}

BaselineOutcome run_react(ChatClient& llm, const ProblemInstance& p) {
  return single_call(llm, react_prompt(p), 1.0, "react:" + p.id);
}

std::optional<std::string> oracle_feedback(const ProblemInstance& p, const std::vector<Action>& plan) {
  PlanningState s = p.initial;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    try {
      const PlanningState next = apply_action(s, plan[i], p.env);
      s = next;
    } catch (const PreconditionViolation& e) {
      const std::string reason = p.kind() == DomainKind::full_sokoban || p.kind() == DomainKind::blocksworld
                                     ? std::string(e.what())
                                     : std::string("it would move into a wall or out of bounds");
      return fmt::format(
          "ORACLE FEEDBACK: Your plan has an ERROR at step {}.\n\nThe action '{}' at position {} is INVALID \n"
          "because {}.\n\nPlease find an alternative path that avoids this issue.\n\n"
          "**Corrected Final Action Sequence:**",
          i + 1, to_string(plan[i]), position_of(s), reason);
    }
  }
  if (at_goal(s, p.goal)) return std::nullopt;
  return fmt::format(
      "ORACLE FEEDBACK: Your plan is INCOMPLETE. After executing all {} actions, you ended at position {} but "
      "did not reach the goal.\n\nPlease find an alternative path that avoids this issue.\n\n"
      "**Corrected Final Action Sequence:**",
      plan.size(), position_of(s));
}

BaselineOutcome run_react_oracle(ChatClient& llm, const ProblemInstance& p) {
  const std::string prompt = react_prompt(p);
  BaselineOutcome first = single_call(llm, prompt, 0.3, "react_oracle:1:" + p.id);
  const auto feedback = oracle_feedback(p, first.plan);
  if (!feedback) return first;
  const std::string second_prompt = fill_template(
      kFeedback, {{"original_prompt", prompt}, {"previous_response", first.final_response}, {"feedback", *feedback}});
  BaselineOutcome second = single_call(llm, second_prompt, 0.3, "react_oracle:2:" + p.id);
  if (second.plan.empty()) {
    first.diagnostics.push_back("corrected response had no plan; keeping the first");
    first.final_response = second.final_response;
    return first;
  }
  return second;
}

bool tot_better(const ToTNode& a, const ToTNode& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return a.plan_length() < b.plan_length();
}

std::vector<ToTNode> parse_tot_candidates(std::string_view text, const std::vector<Action>& prefix,
                                          std::size_t max_actions, std::vector<std::string>* diagnostics) {
  const auto note = [&](std::string msg) {
    if (diagnostics) diagnostics->push_back(std::move(msg));
  };
  std::vector<ToTNode> out;
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    const auto open = text.find('[');
    const auto close = text.rfind(']');
    if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
      doc = json::parse(text.substr(open, close - open + 1), nullptr, false);
    }
  }
  if (doc.is_discarded()) {
    note("reply is not JSON");
    return out;
  }
  if (doc.is_object()) doc = json::array({doc});
  if (!doc.is_array()) {
    note("reply is not a JSON array");
    return out;
  }
  const auto actions_of = [](const json& arr) -> std::optional<std::vector<Action>> {
    if (!arr.is_array()) return std::nullopt;
    std::vector<Action> acts;
    for (const auto& item : arr) {
      if (!item.is_string()) return std::nullopt;
      const auto a = normalize_action_token(item.get<std::string>());
      if (!a) return std::nullopt;
      acts.push_back(*a);
    }
    return acts;
  };
  for (std::size_t i = 0; i < doc.size() && i < 5; ++i) {
    const json& c = doc[i];
    if (!c.is_object()) {
      note(fmt::format("candidate {} is not an object", i + 1));
      continue;
    }
    ToTNode node;
    node.action_prefix = prefix;
    if (c.contains("thought") && c["thought"].is_string()) node.thought = c["thought"].get<std::string>();
    if (c.contains("proposed_actions")) {
      auto acts = actions_of(c["proposed_actions"]);
      if (!acts) {
        note(fmt::format("candidate {} has unreadable proposed_actions", i + 1));
        continue;
      }
      if (acts->size() > max_actions) acts->resize(max_actions);
      node.action_prefix.insert(node.action_prefix.end(), acts->begin(), acts->end());
    }
    if (c.contains("confidence") && c["confidence"].is_number()) {
      node.confidence = static_cast<int>(std::clamp(c["confidence"].get<double>(), 0.0, 100.0));
    }
    if (c.contains("is_terminal") && c["is_terminal"].is_boolean()) node.is_terminal = c["is_terminal"].get<bool>();
    if (c.contains("final_plan") && !c["final_plan"].is_null()) {
      if (auto fp = actions_of(c["final_plan"])) {
        node.final_plan = std::move(*fp);
      } else {
        note(fmt::format("candidate {} has an unreadable final_plan", i + 1));
      }
    }
    out.push_back(std::move(node));
  }
  return out;
}

std::string tot_prompt(const ProblemInstance& p, int depth, int max_depth, const ToTNode& node,
                       const std::vector<std::string>& thought_history) {
  auto vars = layout_vars(p);
  vars["reference_examples"] = is_grid_family(p.kind()) ? fill_template(kGridLayout, vars) : "";
  while (!vars["reference_examples"].empty() && vars["reference_examples"].back() == '\n') {
    vars["reference_examples"].pop_back();
  }
  vars["depth"] = std::to_string(depth);
  vars["max_depth"] = std::to_string(max_depth);
  vars["action_prefix"] = join_actions(node.action_prefix, "(none)");
  std::string history;
  for (const auto& t : thought_history) history += "- " + t + "\n";
  if (history.empty()) history = "(none)\n";
  history.pop_back();
  vars["thought_history"] = history;
  return fill_template(kToT, vars);
}

BaselineOutcome run_tot(ChatClient& llm, const ProblemInstance& p, const ToTParams& params) {
  if (params.breadth < 1 || params.depth < 1 || params.max_actions < 1) throw Error("ToT parameters must be positive");
  BaselineOutcome out;
  std::vector<ToTNode> frontier{ToTNode{}};
  std::vector<ToTNode> terminals;
  std::vector<std::string> history;
  bool any_candidate = false;
  for (int depth = 1; depth <= params.depth && !frontier.empty(); ++depth) {
    std::vector<ToTNode> children;
    for (const auto& node : frontier) {
      const std::string reply = llm.complete(CompletionRequest{tot_prompt(p, depth, params.depth, node, history), 1.0,
                                                               32000, fmt::format("tot:{}:{}", depth, p.id)});
      auto cands = parse_tot_candidates(reply, node.action_prefix, static_cast<std::size_t>(params.max_actions),
                                        &out.diagnostics);
      any_candidate = any_candidate || !cands.empty();
      for (auto& c : cands) (c.is_terminal ? terminals : children).push_back(std::move(c));
    }
    std::stable_sort(children.begin(), children.end(), tot_better);
    if (children.size() > static_cast<std::size_t>(params.breadth)) children.resize(static_cast<std::size_t>(params.breadth));
    for (const auto& c : children) {
      if (!c.thought.empty()) history.push_back(c.thought);
    }
    frontier = std::move(children);
    const bool certain = std::any_of(terminals.begin(), terminals.end(), [](const ToTNode& t) { return t.confidence >= 100; });
    if (certain) break;
  }
  if (!any_candidate) {
    out.diagnostics.push_back("no usable candidates; falling back to zero-shot");
    BaselineOutcome z = run_zero_shot(llm, p);
    z.diagnostics.insert(z.diagnostics.begin(), out.diagnostics.begin(), out.diagnostics.end());
    return z;
  }
  if (!terminals.empty()) {
    std::stable_sort(terminals.begin(), terminals.end(), tot_better);
    const ToTNode& best = terminals.front();
    out.plan = best.final_plan ? *best.final_plan : best.action_prefix;
    return out;
  }
  const ToTNode& top = frontier.front();
  const std::string closing =
      cot_prompt(p) + fill_template(kToTClose, {{"action_prefix", join_actions(top.action_prefix, "(none)")}});
  out.final_response = llm.complete(CompletionRequest{closing, 1.0, 32000, "tot:close:" + p.id});
  out.plan = parse_action_sequence(out.final_response);
  if (out.plan.empty()) out.plan = top.action_prefix;
  return out;
}

}  // namespace licl
