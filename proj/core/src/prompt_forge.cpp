#include "licl/prompt_forge.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/core.h>

#include "licl/errors.hpp"
#include "licl/oracle.hpp"
#include "licl/problem_codec.hpp"
#include "licl/value.hpp"

namespace licl {

namespace {

constexpr std::string_view kPreamble =
    "import collections\n"
    "from typing import Dict, List, Set, Tuple, Union, Optional, Any, FrozenSet\n"
    "\n"
    "PlanningState = Any\n"
    "Action = Any\n";

constexpr std::string_view kIntro = R"(Consider the program fragment below. This program fragment is
incomplete, with key parts of the implementation hidden, by
replacing them with "..." markers.

)";

constexpr std::string_view kGridBlock = R"(IMPORTANT: You are an agent navigating a {grid_size} gridworld.
The grid has {num_walls} walls that block movement.

**Grid Layout:**
```
{ascii_grid}```

)";

constexpr std::string_view kSokobanActions = R"(Valid actions: 
- Movement: move_north, move_south, move_east, move_west
- Pushing: push_north, push_south, push_east, push_west

)";

constexpr std::string_view kQuestion = R"(PROGRAM:
```python
{partial_program}
```

QUESTION: Predict what the output of the program above will be,
given the input shown below.

Respond with the FULL program output, and ONLY the expected
program output: you will be PENALIZED if you introduce any
additional explanatory text.

```
>>> {task_name}({input_str})
```
)";

constexpr std::string_view kUbwIntro = R"(Consider the program fragment below. This program fragment
implements the Universal Blocks World (UBW) algorithm, which is
a systematic two-phase approach for solving blocks world planning
problems. The implementation is incomplete, with key parts
replaced by "..." markers.

UNIVERSAL BLOCKS WORLD ALGORITHM OVERVIEW:
The UBW algorithm works in two distinct phases to efficiently
solve any blocks world configuration:

PHASE 1: STRATEGIC UNSTACKING
- Unstack ALL blocks that are stacked on top of others
- Work from top to bottom, unstacking clear blocks first
- Move incorrectly positioned blocks to the table

PHASE 2: SYSTEMATIC REASSEMBLY
- Build goal configurations from bottom up
- Process blocks in dependency order (place supporting blocks
  before supported blocks)
- Only place a block when its target is ready (clear and in
  final position)
- Ensure structural integrity throughout construction

KEY HEURISTICS FOR IMPLEMENTATION:

1. STATE ANALYSIS:
   - Parse predicates into on(), on-table(), and clear()
     relationships
   - Build dependency graphs: what should be on what
   - Identify bottom blocks (blocks that should be on table
     in goal)

2. UNSTACKING STRATEGY:
   - Check each on(X,Y) relationship in current state
   - If (X,Y) is NOT in goal relationships, consider
     unstacking X
   - Only unstack if X is clear (no blocks on top)
   - Priority: unstack blocks that block other necessary moves

3. REASSEMBLY STRATEGY:
   - For each goal on(X,Y), check if X can be placed on Y
   - X must be: clear AND on-table
   - Y must be: clear AND in its final position
   - Y is in final position if: Y should be on table OR Y is
     already correctly placed on its target

4. ACTION SELECTION LOGIC:
   ```
   For unstacking: if on(X,Y) in current state AND clear(X):
       return move-b-to-t(X,Y)

   For assembly: if goal requires on(X,Y) AND
                    can_place_block(X,Y):
       return move-t-to-b(X,Y)
   ```

5. CORRECTNESS VERIFICATION:
   - Always verify preconditions before suggesting actions
   - Check that actions don't break existing correct
     configurations
   - Ensure goal-directed progress in every move during
     assembly phase

DETAILED TRACE GUIDANCE:
When implementing the UBW algorithm, provide step-by-step
reasoning inside reasoning() calls if required, which is your
scratchpad.

1. State the current configuration clearly
2. Identify which phase you're in (unstacking vs assembly)
3. Explain WHY each action is chosen based on UBW principles
4. Show how the action advances toward the goal
5. Verify preconditions are satisfied
6. Update state representation after each action

PROGRAM:
```python
{partial_program}
```

QUESTION: Predict what the output of the program above will be,
given the input shown below.

IMPLEMENTATION REQUIREMENTS:
- Follow the UBW algorithm phases strictly
- Provide detailed reasoning for each action selection
- Show state analysis and dependency tracking
- Explain how each move contributes to the overall strategy
- Demonstrate understanding of when to unstack vs when to build
- Verify that all actions follow UBW heuristics

Respond with the FULL program output, including detailed
algorithmic traces that demonstrate proper UBW implementation.
Your trace should show:
- Clear identification of current phase (unstacking/assembly)
- Specific reasoning for each action choice
- State updates and goal progress tracking
- Verification that actions follow UBW principles

Under no circumstance must you skip steps in the program output.
You CAN decide to go back and choose different actions if you
feel that you have made a mistake, but the FINAL PLAN must show
the COMPLETE CORRECT PATH ONLY.

```
>>> {task_name}({input_str})
```
)";

struct DocTemplate {
  std::string_view name;
  std::string_view signature;
  std::string_view description;
};

constexpr DocTemplate kDocs[] = {
    {"extract_problem", "def extract_problem(input_str: str) -> str:",
     "Extract a standardized problem description from input."},
    {"extract_initial_state", "def extract_initial_state(problem_str: str) -> PlanningState:",
     "Extract the initial state from a problem description."},
    {"extract_goal", "def extract_goal(problem_str: str) -> PlanningState:",
     "Extract the goal from a problem description."},
    {"at_goal", "def at_goal(state: PlanningState, goal: PlanningState) -> bool:",
     "Check if current state satisfies goal conditions."},
    {"get_applicable_actions",
     "def get_applicable_actions(state: PlanningState, goal: PlanningState) -> Set[Action]:",
     "Get all applicable actions in the current state."},
    {"get_optimal_actions",
     "def get_optimal_actions(state: PlanningState, applicable_actions: List[Action],\n"
     "                      goal: PlanningState) -> Set[Action]:",
     "Get actions that are part of an optimal plan."},
    {"get_recommended_actions",
     "def get_recommended_actions(state: PlanningState, goal: PlanningState) -> Set[Action]:",
     "Get the actions the Universal Blocks World algorithm prescribes in the current state."},
    {"apply_action", "def apply_action(state: PlanningState, action: Action, goal: PlanningState) -> PlanningState:",
     "Apply an action to a state, returning the resulting state."},
};

constexpr std::string_view kTaskDescription =
    "Solve a planning problem described in input_str.\n"
    "\n"
    "This function processes a planning problem description by:\n"
    "1. Extracting the initial state and goal\n"
    "2. Iteratively applying actions until the goal is reached\n"
    "3. Returning the sequence of actions as a plan";

std::string indent(std::string_view text, std::string_view pad) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty()) {
      out += pad;
      out += line;
    }
    out += '\n';
    pos = eol + 1;
  }
  return out;
}

// Splits "a=(1, 2), b='x, y'" at top-level commas.
std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  char quote = 0;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      cur += c;
      if (c == '\\' && i + 1 < s.size()) {
        cur += s[++i];
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      while (i + 1 < s.size() && s[i + 1] == ' ') ++i;
      continue;
    }
    cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::string format_correction(const Correction& c) {
  std::string call = fmt::format(">>> {}({})", c.function, c.input_render);
  if (call.size() > 80) {
    const auto parts = split_top_level(c.input_render);
    call = fmt::format(">>> {}(\n", c.function);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      call += "...     " + parts[i] + (i + 1 < parts.size() ? ",\n" : "\n");
    }
    call += "... )";
  }
  return call + "\n" + c.output_render;
}

std::string PartialProgram::render() const {
  std::string out(preamble);
  out += "\n\n";
  for (const auto& doc : subroutines) {
    out += "@traced\n";
    out += doc.signature;
    out += "\n    \"\"\"";
    out += doc.description;
    out += "\n\n";
    for (const auto& ex : doc.examples) {
      out += indent(format_correction(ex), "    ");
      out += '\n';
    }
    out += "    \"\"\"\n    ...\n\n";
  }
  out += fmt::format("def {}(input_str: str):\n", task_name);
  out += "    \"\"\"";
  out += indent(task_description, "    ").substr(4);
  out += '\n';
  for (const auto& trace : example_traces) {
    out += indent(trace, "    ");
    out += '\n';
  }
  out += "    \"\"\"\n";
  return out;
}

std::size_t PartialProgram::correction_count() const {
  std::size_t n = 0;
  for (const auto& doc : subroutines) n += doc.examples.size();
  return n;
}

const SubroutineDoc* PartialProgram::find(std::string_view name) const {
  for (const auto& doc : subroutines) {
    if (doc.name == name) return &doc;
  }
  return nullptr;
}

PartialProgram base_program(DomainKind kind, const std::vector<ProblemInstance>& examples) {
  PartialProgram pp;
  pp.kind = kind;
  pp.preamble = std::string(kPreamble);
  for (const std::string& name : traced_subroutines(kind)) {
    const auto it = std::find_if(std::begin(kDocs), std::end(kDocs), [&](const DocTemplate& d) { return d.name == name; });
    pp.subroutines.push_back({std::string(it->name), std::string(it->signature), std::string(it->description), {}});
  }
  pp.task_name = task_function_name(kind);
  pp.task_description = std::string(kTaskDescription);
  for (const auto& p : examples) {
    if (p.kind() != kind) throw DomainMismatch(fmt::format("example {} is not a {} problem", p.id, to_string(kind)));
    std::string trace = fmt::format(">>> {}({})\n", pp.task_name, python_quote(serialize_problem(p)));
    trace += render_oracle_trace(p);
    pp.example_traces.push_back(std::move(trace));
  }
  return pp;
}

std::vector<ProblemInstance> default_example_problems(DomainKind kind, const GenerateParams& params) {
  const bool long_traces = kind == DomainKind::blocksworld || kind == DomainKind::full_sokoban;
  const std::size_t k = long_traces ? 2 : 3;
  std::vector<ProblemInstance> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(generate_problem(kind, 351 + i, params));
  return out;
}

PartialProgram insert_corrections(const PartialProgram& base, const std::vector<Correction>& corrections) {
  PartialProgram out = base;
  std::set<std::string> seen;
  for (const auto& doc : out.subroutines) {
    for (const auto& ex : doc.examples) seen.insert(ex.key());
  }
  for (const auto& c : corrections) {
    auto it = std::find_if(out.subroutines.begin(), out.subroutines.end(),
                           [&](const SubroutineDoc& d) { return d.name == c.function; });
    if (it == out.subroutines.end()) {
      std::string known;
      for (const auto& d : out.subroutines) known += (known.empty() ? "" : ", ") + d.name;
      throw RoutingError(fmt::format("no subroutine named '{}' (known: {})", c.function, known));
    }
    if (seen.insert(c.key()).second) it->examples.push_back(c);
  }
  return out;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    std::size_t end = open + 1;
    while (end < tmpl.size() && (std::islower(static_cast<unsigned char>(tmpl[end])) || tmpl[end] == '_')) ++end;
    if (end == open + 1 || end >= tmpl.size() || tmpl[end] != '}') {
      out += '{';
      pos = open + 1;
      continue;
    }
    const std::string name(tmpl.substr(open + 1, end - open - 1));
    const auto it = vars.find(name);
    if (it == vars.end()) throw AssemblyError(fmt::format("template variable {{{}}} has no value", name));
    out += it->second;
    pos = end + 1;
  }
  return out;
}

std::string build_prompt(const PartialProgram& pp, std::string_view task_name, std::string_view input_str,
                         const PromptOptions& options) {
  std::map<std::string, std::string> vars{
      {"partial_program", pp.render()},
      {"task_name", std::string(task_name)},
      {"input_str", std::string(input_str)},
  };
  if (options.ubw_preamble) {
    if (options.ascii_grid) throw AssemblyError("the UBW prompt has no grid layout");
    return fill_template(kUbwIntro, vars);
  }
  std::string tmpl(kIntro);
  if (options.ascii_grid) {
    vars["grid_size"] = options.grid_size;
    vars["num_walls"] = std::to_string(options.num_walls);
    vars["ascii_grid"] = *options.ascii_grid;
    tmpl += kGridBlock;
  }
  if (options.sokoban_actions) tmpl += kSokobanActions;
  tmpl += kQuestion;
  return fill_template(tmpl, vars);
}

PromptOptions prompt_options_for(const ProblemInstance& p, bool ascii_grid) {
  PromptOptions o;
  if (const auto* g = std::get_if<GridSpec>(&p.env)) {
    if (ascii_grid) {
      o.ascii_grid = render_ascii(p.env, p.initial, p.goal);
      o.grid_size = fmt::format("{}x{}", g->width(), g->height());
      o.num_walls = g->wall_count();
    }
    o.sokoban_actions = g->kind() == DomainKind::full_sokoban;
  } else {
    o.ubw_preamble = true;
  }
  return o;
}

std::string licl_prompt(const PartialProgram& pp, const ProblemInstance& p, bool ascii_grid) {
  return build_prompt(pp, pp.task_name, python_quote(serialize_problem(p)), prompt_options_for(p, ascii_grid));
}

}  // namespace licl
