#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "licl/domain.hpp"
#include "licl/value.hpp"

namespace licl {

// Exact goal distances over every valid state of an environment, built by
// backward breadth-first search from the goal states.
class DistanceField {
 public:
  DistanceField(const Environment& env, const Goal& goal);

  // -1 when the goal is unreachable or the state is invalid.
  int distance(const PlanningState& s) const;
  const Environment& environment() const noexcept { return indexer_.environment(); }
  std::size_t reachable_count() const noexcept { return reachable_; }

 private:
  StateIndexer indexer_;
  std::vector<int> dist_;
  std::size_t reachable_ = 0;
};

// Shared, lazily built field for (env, goal). Safe to call concurrently;
// callers always receive a fully built field.
std::shared_ptr<const DistanceField> distance_field(const Environment& env, const Goal& goal);

// Applicable actions that decrease the goal distance by one, in canonical order.
// Throws NoPlan when the goal is unreachable from `state`.
std::vector<Action> get_optimal_actions(const PlanningState& state, const Goal& goal, const Environment& env);

// Universal Blocks World recommendation. Phase 1 unstacks every clear block
// that is not well placed; phase 2 (only when phase 1 is empty) places a
// clear table block X onto Y for each goal on(X, Y) whose Y is clear and
// well placed. A block is well placed when it rests on the table and the
// goal does not put it on anything, or when on(b, c) holds in both state and
// goal and c is well placed. Empty at the goal.
std::vector<Action> get_recommended_actions(const BlocksState& state, const BlocksGoal& goal);

// Minimum-length plan. Throws NoPlan for unsolvable problems.
std::vector<Action> optimal_plan(const ProblemInstance& p);
int optimal_length(const ProblemInstance& p);

// The plan the oracle itself traces: the first optimal action in canonical
// order at every step (first recommended action for BlocksWorld).
std::vector<Action> oracle_rollout(const ProblemInstance& p);

// Traced subroutine names, in documentation order, for a domain.
std::vector<std::string> traced_subroutines(DomainKind kind);

enum class AnswerKind { text, state, goal, boolean, action_set };

struct OracleAnswer {
  AnswerKind kind = AnswerKind::text;
  Value value;        // as printed in a trace
  Value correction;   // as printed in a doctest (action collections become sets)
  std::vector<Action> actions;  // action_set answers only
};

// Ground truth for one traced call. Throws OracleQueryError for unknown
// functions or arguments that do not decode, and PreconditionViolation when
// apply_action is asked for an inapplicable action.
OracleAnswer answer(std::string_view function, const std::vector<Argument>& args, const ProblemInstance& p);

// Whether a model's return value agrees with the oracle. Action collections
// compare as sets; states and goals compare after decoding.
bool output_matches(const OracleAnswer& truth, const Value& output, const ProblemInstance& p);

// Canonical doctest input for a call, with parameter names:
// "state=(3, 4), goal=(7, 8)". get_optimal_actions drops its applicable list.
std::string correction_input(std::string_view function, const std::vector<Argument>& args, const ProblemInstance& p);

// Full oracle trace for a problem, one line per entry, newline terminated.
std::string render_oracle_trace(const ProblemInstance& p);

// Task function called on the problem text ("pddl_grid").
std::string task_function_name(DomainKind kind);

}  // namespace licl
