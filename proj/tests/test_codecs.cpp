#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "licl/domain.hpp"
#include "licl/errors.hpp"
#include "licl/problem_codec.hpp"
#include "licl/trace_codec.hpp"
#include "licl/value.hpp"
#include "support/test_oracles.hpp"

using namespace licl;
namespace to = testing_oracles;

namespace {

const char* const kRef351 =
    "(define (problem gw-task-351)\n  (:domain gridworld-10x10)\n  (:init (at c9-5))\n  (:goal (at c5-10))\n)\n";

Environment grid10() { return GridSpec(DomainKind::maze, 10, 10); }

std::vector<Action> acts(std::initializer_list<const char*> names) {
  std::vector<Action> out;
  for (const char* n : names) out.push_back(*parse_action(n));
  return out;
}

}  // namespace

TEST_CASE("problem text parses to start and goal") {
  const auto p = parse_problem(
      "(define (problem gw-task-351) (:domain gridworld-10x10) (:init (at c9-5)) (:goal (at c5-10)))", grid10());
  CHECK(p.id == "gw-task-351");
  CHECK(std::get<GridState>(p.initial).agent == Coord{9, 5});
  CHECK(std::get<GridGoal>(p.goal).cell == Coord{5, 10});
}

TEST_CASE("problem text serializes canonically") {
  ProblemInstance p;
  p.id = "gw-task-352";
  p.env = grid10();
  p.domain_name = "gridworld-10x10";
  p.initial = GridState{{9, 3}};
  p.goal = GridGoal{{7, 7}};
  const std::string text = serialize_problem(p);
  CHECK(text.find("(:init (at c9-3))") != std::string::npos);
  CHECK(text.find("(:goal (at c7-7))") != std::string::npos);
  p.id = "gw-task-351";
  p.initial = GridState{{9, 5}};
  p.goal = GridGoal{{5, 10}};
  CHECK(serialize_problem(p) == kRef351);
}

TEST_CASE("blocks facts") {
  const std::vector<Block> abc{'A', 'B', 'C'};
  const auto p = parse_problem(
      "(define (problem bw-task-1) (:domain blocksworld-3) (:init (on A B) (on-table B) (on-table C) (clear A) "
      "(clear C)) (:goal (on B C)))",
      BlocksSpec{abc});
  const auto& s = std::get<BlocksState>(p.initial);
  CHECK(s.on == std::set<OnPair>{{'A', 'B'}});
  CHECK(s.on_table == std::set<Block>{'B', 'C'});
  CHECK(s.clear == std::set<Block>{'A', 'C'});
}

TEST_CASE("malformed problem text reports a byte offset") {
  try {
    parse_problem("(define (problem x) (:domain gridworld-10x10) (:init (at c9-5)", grid10());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
  }
  CHECK_THROWS_AS(parse_problem(kRef351, GridSpec(DomainKind::maze, 4, 4)), InvalidState);
}

TEST_CASE("serialize then parse is the identity") {
  for (DomainKind k : {DomainKind::two_room, DomainKind::maze, DomainKind::sokoban_grid, DomainKind::full_sokoban,
                       DomainKind::blocksworld}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = generate_problem(k, seed);
      CHECK(parse_problem(serialize_problem(p), p.env) == p);
      CHECK(environment_from_json(environment_to_json(p.env)) == p.env);
    }
  }
}

TEST_CASE("layout-insensitive normalization") {
  CHECK(normalize_problem_text(kRef351) ==
        normalize_problem_text("(define (problem gw-task-351) (:domain gridworld-10x10)\n(:init (at c9-5) ) "
                               "(:goal (at c5-10)))"));
  const auto h = parse_problem_header(kRef351);
  CHECK(h.id == "gw-task-351");
  CHECK(h.domain_name == "gridworld-10x10");
}

TEST_CASE("python literals") {
  CHECK(render(parse_value("['move-north', 'move-east']")) == "['move-north', 'move-east']");
  CHECK(render(parse_value("( 9 ,5 )")) == "(9, 5)");
  CHECK(render(parse_value("set()")) == "set()");
  CHECK(render(parse_value("{'a': True, 'b': None}")) == "{'a': True, 'b': None}");
  CHECK(parse_value("{'x', 'y'}") == parse_value("{'y', 'x'}"));
  CHECK(render(Value::string("it's")) == "\"it's\"");
  CHECK(python_quote("a\nb") == "'a\\nb'");
  CHECK(parse_value(python_quote(kRef351)).as_string() == kRef351);
  CHECK_THROWS_AS(parse_value("[1, 2"), ParseError);
  CHECK_THROWS_AS(parse_value("1 2"), ParseError);
  CHECK_FALSE(try_parse_value("]").has_value());
}

TEST_CASE("call arguments") {
  const auto args = parse_arguments("(9, 5), 'move-north', goal=(5, 10)");
  REQUIRE(args.size() == 3);
  CHECK(args[0].name.empty());
  CHECK(args[2].name == "goal");
  CHECK(render(args[2].value) == "(5, 10)");
}

TEST_CASE("reference trace parses completely") {
  const Trace t = parse_trace(to::fixture("reference_trace_351.txt"));
  REQUIRE(t.calls.size() == 48);
  CHECK(t.calls.front().name == "extract_problem");
  CHECK(render(*t.calls.front().output) == "'gridworld-10x10'");
  REQUIRE(t.final_answer.has_value());
  CHECK(t.final_answer->size() == 11);
  CHECK(to_string(t.final_answer->front()) == "move-north");
  CHECK(t.diagnostics.empty());
}

TEST_CASE("empty and noisy traces") {
  const Trace empty = parse_trace("");
  CHECK(empty.calls.empty());
  CHECK_FALSE(empty.final_answer.has_value());

  const Trace noisy = parse_trace(
      "thinking out loud\nCalling at_goal((1, 1), (2, 2))...\nCalling get_applicable_actions((1, 1), (2, 2))...\n"
      "...get_applicable_actions returned ['move-north']\n");
  REQUIRE(noisy.calls.size() == 2);
  CHECK_FALSE(noisy.calls[0].complete());
  CHECK(noisy.calls[1].complete());
  CHECK_FALSE(noisy.diagnostics.empty());
}

TEST_CASE("rendered lines") {
  const Value s = Value::tuple({Value::integer(9), Value::integer(5)});
  const Value g = Value::tuple({Value::integer(5), Value::integer(10)});
  CHECK(render_call("at_goal", {s, g}, Value::boolean(false)) ==
        "Calling at_goal((9, 5), (5, 10))...\n...at_goal returned False");
  CHECK(render_return_line("apply_action", Value::tuple({Value::integer(9), Value::integer(6)})) ==
        "...apply_action returned (9, 6)");
  CHECK(render_final_answer(acts({"move-north", "move-east"})) ==
        "Final answer: move-north move-east\n['move-north', 'move-east']");
}

TEST_CASE("answer-line patterns") {
  CHECK(parse_action_sequence("**Final Action Sequence:** move-north, move-east") ==
        acts({"move-north", "move-east"}));
  CHECK(parse_action_sequence("Plan: up, right") == acts({"move-north", "move-east"}));
  CHECK(parse_action_sequence("up, right") == acts({"move-north", "move-east"}));
  CHECK(parse_action_sequence("First move-west, then again move-west.") == acts({"move-west", "move-west"}));
  CHECK(parse_action_sequence("Plan: push_east, move_north") == acts({"push-east", "move-north"}));
  CHECK(parse_action_sequence("**Final Action Sequence:** move-b-to-t(A, B), move-t-to-b(A, C)") ==
        acts({"move-b-to-t(A, B)", "move-t-to-b(A, C)"}));
  CHECK(parse_action_sequence("nothing useful").empty());
}

TEST_CASE("first matching pattern wins over later ones") {
  CHECK(parse_action_sequence("Plan: move-south\n**Final Action Sequence:** move-north") == acts({"move-north"}));
  CHECK(parse_action_sequence("Final Action Sequence: left\nFinal Action Sequence: right") == acts({"move-west"}));
}

TEST_CASE("token normalization") {
  CHECK(normalize_action_token("UP") == Action::move(Direction::north));
  CHECK(normalize_action_token("'move_west',") == Action::move(Direction::west));
  CHECK_FALSE(normalize_action_token("fly").has_value());
}

TEST_CASE("trace final answer prefers the last answer line") {
  const Trace t = parse_trace("Final answer: move-north\nFinal answer: move-east move-east\n");
  REQUIRE(t.final_answer.has_value());
  CHECK(*t.final_answer == acts({"move-east", "move-east"}));
}
