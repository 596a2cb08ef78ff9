#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "licl/domain.hpp"
#include "licl/errors.hpp"
#include "support/test_oracles.hpp"

using namespace licl;
namespace to = testing_oracles;

namespace {

GridSpec empty_grid(int n, DomainKind kind = DomainKind::two_room) { return GridSpec(kind, n, n); }

GridSpec walled_room(int n) {
  GridSpec g(DomainKind::full_sokoban, n, n);
  for (int y = 1; y <= n; ++y) {
    for (int x = 1; x <= n; ++x) {
      if (x == 1 || y == 1 || x == n || y == n) g.set_wall({x, y});
    }
  }
  return g;
}

std::set<std::string> names(const std::vector<Action>& v) {
  std::set<std::string> out;
  for (const auto& a : v) out.insert(to_string(a));
  return out;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Applicable, InteriorCellOfEmptyGrid) {
  const Environment env = empty_grid(8);
  EXPECT_EQ(names(applicable_actions(GridState{{4, 4}}, env)),
            (std::set<std::string>{"move-north", "move-south", "move-east", "move-west"}));
}

TEST(Applicable, CornerOfEmptyGrid) {
  const Environment env = empty_grid(8);
  const auto acts = applicable_actions(GridState{{1, 1}}, env);
  ASSERT_EQ(acts.size(), 2u);
  EXPECT_EQ(to_string(acts[0]), "move-north");
  EXPECT_EQ(to_string(acts[1]), "move-east");
}

TEST(Applicable, WallCellsAreNotEntered) {
  GridSpec g = empty_grid(5);
  g.set_wall({4, 3});
  EXPECT_EQ(names(applicable_actions(GridState{{3, 3}}, g)),
            (std::set<std::string>{"move-north", "move-south", "move-west"}));
}

TEST(Applicable, SokobanPushNeedsFreeCellBehindBox) {
  const GridSpec g = walled_room(6);
  const auto acts = names(applicable_actions(SokobanState{{2, 2}, {3, 2}}, g));
  EXPECT_TRUE(acts.count("push-east"));
  EXPECT_FALSE(acts.count("move-east"));
  const auto blocked = names(applicable_actions(SokobanState{{3, 2}, {4, 2}}, walled_room(5)));
  EXPECT_FALSE(blocked.count("push-east"));
}

TEST(Apply, GridMoveNorth) {
  const Environment env = empty_grid(10);
  EXPECT_EQ(std::get<GridState>(apply_action(GridState{{9, 5}}, Action::move(Direction::north), env)).agent,
            (Coord{9, 6}));
}

TEST(Apply, SokobanPushEast) {
  const Environment env = walled_room(7);
  const auto s = std::get<SokobanState>(apply_action(SokobanState{{2, 2}, {3, 2}}, Action::push(Direction::east), env));
  EXPECT_EQ(s.agent, (Coord{3, 2}));
  EXPECT_EQ(s.box, (Coord{4, 2}));
}

TEST(Apply, BlocksUnstackToTable) {
  const std::vector<Block> blocks{'A', 'B', 'C'};
  const Environment env = BlocksSpec{blocks};
  const auto s0 = BlocksState::from_on({{'A', 'B'}}, blocks);
  const auto s1 = std::get<BlocksState>(apply_action(s0, Action::b_to_t('A', 'B'), env));
  EXPECT_TRUE(s1.on.empty());
  EXPECT_EQ(s1.on_table, (std::set<Block>{'A', 'B', 'C'}));
  EXPECT_EQ(s1.clear, (std::set<Block>{'A', 'B', 'C'}));
}

TEST(Apply, InapplicableActionThrows) {
  GridSpec g = empty_grid(4);
  g.set_wall({2, 1});
  EXPECT_THROW(apply_action(GridState{{1, 1}}, Action::move(Direction::east), g), PreconditionViolation);
  EXPECT_THROW(apply_action(GridState{{1, 1}}, Action::move(Direction::south), g), PreconditionViolation);
  const std::vector<Block> blocks{'A', 'B', 'C'};
  const auto s = BlocksState::from_on({{'A', 'B'}}, blocks);
  EXPECT_THROW(apply_action(s, Action::t_to_b('C', 'B'), BlocksSpec{blocks}), PreconditionViolation);
}

TEST(Goal, GridAndBlocks) {
  EXPECT_TRUE(at_goal(GridState{{5, 10}}, GridGoal{{5, 10}}));
  EXPECT_FALSE(at_goal(GridState{{9, 5}}, GridGoal{{5, 10}}));
  const std::vector<Block> blocks{'A', 'B', 'C', 'D'};
  const auto s = BlocksState::from_on({{'A', 'B'}, {'C', 'D'}}, blocks);
  EXPECT_TRUE(at_goal(s, BlocksGoal{{{'A', 'B'}}}));
  EXPECT_THROW(at_goal(GridState{{1, 1}}, BlocksGoal{}), DomainMismatch);
}

TEST(Validate, RejectsBrokenStates) {
  GridSpec g = empty_grid(4);
  g.set_wall({2, 2});
  EXPECT_THROW(validate_state(GridState{{2, 2}}, g), InvalidState);
  EXPECT_THROW(validate_state(GridState{{5, 1}}, g), InvalidState);
  EXPECT_THROW(validate_state(SokobanState{{3, 3}, {3, 3}}, walled_room(6)), InvalidState);
  BlocksState cyclic;
  cyclic.on = {{'A', 'B'}, {'B', 'A'}};
  EXPECT_THROW(validate_state(cyclic, BlocksSpec{{'A', 'B'}}), InvalidState);
}

TEST(Trap, CornerBoxIsTrapped) {
  const GridSpec g = walled_room(5);
  EXPECT_TRUE(is_trap(SokobanState{{3, 2}, {2, 2}}, g, SokobanGoal{{3, 3}}));
}

TEST(Trap, BoxOnTargetIsNotTrapped) {
  const GridSpec g = walled_room(5);
  EXPECT_FALSE(is_trap(SokobanState{{3, 2}, {2, 2}}, g, SokobanGoal{{2, 2}}));
}

TEST(Trap, BoxAlongWallWithTargetOnThatWall) {
  const GridSpec g = walled_room(5);
  EXPECT_FALSE(is_trap(SokobanState{{3, 2}, {2, 3}}, g, SokobanGoal{{2, 4}}));
  const auto sp = to::sokoban_space(g, {3, 2}, {2, 3}, {2, 4});
  EXPECT_FALSE(sp.trap.at({{3, 2}, {2, 3}}));
}

TEST(Generate, DeterministicPerSeed) {
  EXPECT_EQ(generate_problem(DomainKind::two_room, 1), generate_problem(DomainKind::two_room, 1));
  EXPECT_NE(generate_problem(DomainKind::two_room, 1), generate_problem(DomainKind::two_room, 2));
  const auto p = generate_problem(DomainKind::two_room, 1);
  EXPECT_EQ(p.id, "gw-task-1");
  EXPECT_EQ(p.domain_name, "gridworld-8x8");
}

TEST(Generate, MazesAreTrees) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto t = to::maze_graph(std::get<GridSpec>(generate_problem(DomainKind::maze, seed).env));
    EXPECT_TRUE(t.connected);
    EXPECT_EQ(t.edges + 1, t.vertices);
  }
}

TEST(Generate, BlocksHaveOneSupportEach) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = generate_problem(DomainKind::blocksworld, seed);
    const auto& s = std::get<BlocksState>(p.initial);
    const auto& blocks = std::get<BlocksSpec>(p.env).blocks;
    ASSERT_EQ(blocks.size(), 5u);
    for (Block b : blocks) {
      const auto on = std::count_if(s.on.begin(), s.on.end(), [&](const OnPair& pr) { return pr.first == b; });
      EXPECT_EQ(on + static_cast<long>(s.on_table.count(b)), 1);
    }
    EXPECT_NO_THROW(validate_state(s, p.env));
  }
}

TEST(Generate, EveryKindIsSolvable) {
  for (DomainKind k : {DomainKind::two_room, DomainKind::maze, DomainKind::sokoban_grid, DomainKind::full_sokoban,
                       DomainKind::blocksworld}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_TRUE(is_solvable(generate_problem(k, seed)));
  }
}

TEST(Generate, BadParametersThrow) {
  GenerateParams gp;
  gp.n_blocks = 0;
  EXPECT_THROW(generate_problem(DomainKind::blocksworld, 1, gp), GenerationError);
  gp = {};
  gp.size = 2;
  EXPECT_THROW(generate_problem(DomainKind::maze, 1, gp), GenerationError);
}

TEST(Render, SmallestGrid) {
  const auto lines = lines_of(render_ascii(empty_grid(2), GridState{{1, 1}}, GridGoal{{2, 2}}));
  ASSERT_GE(lines.size(), 6u);
  EXPECT_NE(lines[0].find('1'), std::string::npos);
  EXPECT_NE(lines[0].find('2'), std::string::npos);
  EXPECT_EQ(lines[2].rfind(" 2 |", 0), 0u);
  EXPECT_EQ(lines[4].rfind(" 1 |", 0), 0u);
  EXPECT_EQ(lines[2], " 2 | . | . |");
  EXPECT_EQ(lines[4], " 1 | . | . |");
}

TEST(Render, ReferenceMazeWall) {
  const std::string text = to::fixture("reference_maze_10x10.txt");
  const GridSpec g = to::load_ascii_maze(text, 10, 10);
  EXPECT_TRUE(g.is_wall({3, 9}));
  EXPECT_EQ(render_ascii(g, GridState{{9, 5}}, GridGoal{{5, 10}}), text);
}

TEST(Render, SokobanBox) {
  const auto lines = lines_of(render_ascii(walled_room(6), SokobanState{{2, 2}, {4, 4}}, SokobanGoal{{3, 3}}));
  const std::string& row4 = lines[2 + 2 * (6 - 4)];
  ASSERT_EQ(row4.rfind(" 4 |", 0), 0u);
  EXPECT_EQ(row4[3 + 4 * 4 - 2], '$');
  EXPECT_THROW(render_ascii(BlocksSpec{{'A'}}, BlocksState::from_on({}, {'A'}), BlocksGoal{}), UnsupportedDomain);
}

TEST(Actions, NamesRoundTrip) {
  for (const auto& a : {Action::move(Direction::west), Action::push(Direction::north), Action::b_to_b('A', 'B', 'C'),
                        Action::b_to_t('A', 'B'), Action::t_to_b('C', 'A')}) {
    const auto back = parse_action(to_string(a));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, a);
  }
  EXPECT_EQ(parse_action("move_north"), Action::move(Direction::north));
  EXPECT_EQ(to_string(Action::b_to_t('A', 'B')), "move-b-to-t(A, B)");
  EXPECT_FALSE(parse_action("jump").has_value());
}

TEST(StateIndexer, RoundTripsValidStates) {
  const Environment env = walled_room(5);
  StateIndexer idx(env);
  std::size_t valid = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (!idx.valid(i)) continue;
    ++valid;
    EXPECT_EQ(idx.index_of(idx.state_at(i)), i);
  }
  EXPECT_EQ(valid, 9u * 8u);
  const StateIndexer blocks(BlocksSpec{{'A', 'B', 'C'}});
  EXPECT_EQ(blocks.size(), 13u);
}
