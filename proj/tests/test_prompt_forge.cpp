#include <gtest/gtest.h>

#include "licl/domain.hpp"
#include "licl/errors.hpp"
#include "licl/oracle.hpp"
#include "licl/problem_codec.hpp"
#include "licl/prompt_forge.hpp"
#include "licl/value.hpp"

using namespace licl;

namespace {

Correction wall_east_correction() {
  ProblemInstance p;
  p.id = "gw-task-7";
  GridSpec g(DomainKind::two_room, 8, 8);
  g.set_wall({4, 4});
  p.env = g;
  p.domain_name = domain_name_for(p.env);
  p.initial = GridState{{3, 4}};
  p.goal = GridGoal{{7, 8}};
  const std::vector<Argument> args{{"state", parse_value("(3, 4)")}, {"goal", parse_value("(7, 8)")}};
  const auto a = answer("get_applicable_actions", args, p);
  return {"get_applicable_actions", correction_input("get_applicable_actions", args, p), render(a.correction),
          p.id + "#5"};
}

PartialProgram maze_base() {
  return base_program(DomainKind::maze, default_example_problems(DomainKind::maze));
}

}  // namespace

TEST(FormatCorrection, WallEast) {
  const Correction c = wall_east_correction();
  EXPECT_EQ(format_correction(c),
            ">>> get_applicable_actions(state=(3, 4), goal=(7, 8))\n{'move-north', 'move-south', 'move-west'}");
  EXPECT_EQ(format_correction(c), format_correction(c));
  EXPECT_EQ(c.key(), "get_applicable_actions(state=(3, 4), goal=(7, 8))");
}

TEST(FormatCorrection, BlocksRecommendation) {
  const Correction c{"get_recommended_actions",
                     "state={'on': [('A', 'B')], 'on_table': ['B', 'C'], 'clear': ['A', 'C']}, goal=[('B', 'C')]",
                     "{'move-b-to-t(A, B)'}", "bw-task-1#6"};
  const std::string text = format_correction(c);
  EXPECT_TRUE(text.size() >= 21 && text.substr(text.size() - 21) == "{'move-b-to-t(A, B)'}");
  // longer than 80 characters, so the call is split over continuation lines
  EXPECT_NE(text.find("\n... "), std::string::npos);
  EXPECT_EQ(text.rfind(">>> get_recommended_actions(", 0), 0u);
}

TEST(InsertCorrections, DedupByFunctionAndInput) {
  const PartialProgram base = maze_base();
  Correction a = wall_east_correction();
  Correction b = a;
  b.origin = "gw-task-9#17";
  const PartialProgram once = insert_corrections(base, {a});
  const PartialProgram twice = insert_corrections(base, {a, b});
  EXPECT_EQ(once.render(), twice.render());
  EXPECT_EQ(twice.correction_count(), 1u);
  EXPECT_EQ(insert_corrections(once, {b}).render(), once.render());
}

TEST(InsertCorrections, EmptyListIsIdentity) {
  const PartialProgram base = maze_base();
  EXPECT_EQ(insert_corrections(base, {}).render(), base.render());
  EXPECT_EQ(base.correction_count(), 0u);
}

TEST(InsertCorrections, ArrivalOrderInsideTheDocstring) {
  const PartialProgram base = maze_base();
  Correction first = wall_east_correction();
  Correction second = first;
  second.input_render = "state=(1, 1), goal=(7, 8)";
  second.output_render = "{'move-north', 'move-east'}";
  const std::string text = insert_corrections(base, {first, second}).render();
  const auto p1 = text.find(">>> " + first.key());
  const auto p2 = text.find(">>> " + second.key());
  ASSERT_NE(p1, std::string::npos);
  ASSERT_NE(p2, std::string::npos);
  EXPECT_LT(p1, p2);
  // corrections sit inside get_applicable_actions, before the next def
  const auto def = text.find("def get_applicable_actions");
  const auto next_def = text.find("def ", def + 4);
  EXPECT_LT(def, p1);
  EXPECT_LT(p2, next_def);
}

TEST(InsertCorrections, UnknownSubroutineThrows) {
  Correction c = wall_east_correction();
  c.function = "teleport";
  EXPECT_THROW(insert_corrections(maze_base(), {c}), RoutingError);
}

TEST(InsertCorrections, GrowthIsMonotone) {
  PartialProgram pp = maze_base();
  std::size_t prev = pp.render().size();
  for (int x = 1; x <= 10; ++x) {
    Correction c = wall_east_correction();
    c.input_render = "state=(" + std::to_string(x) + ", 2), goal=(7, 8)";
    pp = insert_corrections(pp, {c});
    EXPECT_GT(pp.render().size(), prev);
    prev = pp.render().size();
  }
}

TEST(FillTemplate, MissingPlaceholderThrows) {
  EXPECT_EQ(fill_template("a {x} b {y}", {{"x", "1"}, {"y", "2"}}), "a 1 b 2");
  EXPECT_THROW(fill_template("a {x} b {y}", {{"x", "1"}}), AssemblyError);
}

TEST(Prompt, GridScaffoldToggle) {
  const auto p = generate_problem(DomainKind::maze, 12);
  const PartialProgram pp = maze_base();
  const std::string with = licl_prompt(pp, p, true);
  const std::string without = licl_prompt(pp, p, false);
  const std::string grid = render_ascii(p.env, p.initial, p.goal);
  EXPECT_NE(with.find(grid), std::string::npos);
  EXPECT_EQ(without.find(grid), std::string::npos);
  EXPECT_NE(with.find(python_quote(serialize_problem(p))), std::string::npos);
  EXPECT_NE(with.find("PROGRAM:\n```python"), std::string::npos);
  EXPECT_EQ(with, licl_prompt(pp, p, true));
}

TEST(Prompt, BaseProgramEmbedsOracleTraces) {
  const auto examples = default_example_problems(DomainKind::maze);
  ASSERT_FALSE(examples.empty());
  const std::string text = base_program(DomainKind::maze, examples).render();
  for (const auto& e : examples) {
    const std::string first_line = render_oracle_trace(e).substr(0, render_oracle_trace(e).find('\n'));
    EXPECT_NE(text.find(first_line), std::string::npos) << e.id;
  }
  for (const auto& name : traced_subroutines(DomainKind::maze)) {
    EXPECT_NE(text.find("def " + name), std::string::npos) << name;
  }
}

TEST(Prompt, DomainVariants) {
  const auto sok = generate_problem(DomainKind::full_sokoban, 1);
  const std::string s = licl_prompt(base_program(DomainKind::full_sokoban, default_example_problems(DomainKind::full_sokoban)),
                                    sok, true);
  EXPECT_NE(s.find("Valid actions: \n- Movement: move_north, move_south, move_east, move_west"), std::string::npos);
  EXPECT_NE(s.find("- Pushing: push_north, push_south, push_east, push_west"), std::string::npos);

  const auto bw = generate_problem(DomainKind::blocksworld, 1);
  const std::string b = licl_prompt(base_program(DomainKind::blocksworld, default_example_problems(DomainKind::blocksworld)),
                                    bw, true);
  EXPECT_NE(b.find("PHASE 1"), std::string::npos);
  EXPECT_NE(b.find("PHASE 2"), std::string::npos);
  EXPECT_NE(b.find("def get_recommended_actions"), std::string::npos);
}
