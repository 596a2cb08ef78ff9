#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace licl {

enum class DomainKind { two_room, maze, sokoban_grid, full_sokoban, blocksworld };

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

// Every domain except BlocksWorld lives on a grid.
constexpr bool is_grid_family(DomainKind kind) { return kind != DomainKind::blocksworld; }

struct Coord {
  int x = 0;  // column, 1-indexed
  int y = 0;  // row, 1-indexed, increasing northwards

  friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

std::string to_string(Coord c);

enum class Direction : std::uint8_t { north, south, east, west };

constexpr Coord step(Coord c, Direction d) {
  switch (d) {
    case Direction::north: return {c.x, c.y + 1};
    case Direction::south: return {c.x, c.y - 1};
    case Direction::east: return {c.x + 1, c.y};
    case Direction::west: return {c.x - 1, c.y};
  }
  return c;
}

constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::north: return Direction::south;
    case Direction::south: return Direction::north;
    case Direction::east: return Direction::west;
    case Direction::west: return Direction::east;
  }
  return d;
}

inline constexpr Direction kDirections[] = {Direction::north, Direction::south, Direction::east,
                                            Direction::west};

// Rectangular grid with blocked cells.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(DomainKind kind, int width, int height, std::uint64_t seed = 0);

  DomainKind kind() const noexcept { return kind_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int cell_count() const noexcept { return width_ * height_; }

  bool in_bounds(Coord c) const noexcept {
    return c.x >= 1 && c.x <= width_ && c.y >= 1 && c.y <= height_;
  }
  bool is_wall(Coord c) const noexcept { return in_bounds(c) && wall_[index(c)] != 0; }
  bool is_open(Coord c) const noexcept { return in_bounds(c) && wall_[index(c)] == 0; }

  void set_wall(Coord c, bool blocked = true);

  int index(Coord c) const noexcept { return (c.y - 1) * width_ + (c.x - 1); }
  Coord coord(int index) const noexcept { return {index % width_ + 1, index / width_ + 1}; }

  std::vector<Coord> walls() const;
  std::vector<Coord> open_cells() const;
  std::size_t wall_count() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  DomainKind kind_ = DomainKind::two_room;
  int width_ = 0;
  int height_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> wall_;
};

using Block = char;
using OnPair = std::pair<Block, Block>;  // (upper, lower)

struct BlocksSpec {
  std::vector<Block> blocks;  // sorted, distinct

  friend bool operator==(const BlocksSpec&, const BlocksSpec&) = default;
};

using Environment = std::variant<GridSpec, BlocksSpec>;

DomainKind kind_of(const Environment& env);

struct GridState {
  Coord agent;
  friend auto operator<=>(const GridState&, const GridState&) = default;
};

struct SokobanState {
  Coord agent;
  Coord box;
  friend auto operator<=>(const SokobanState&, const SokobanState&) = default;
};

struct BlocksState {
  std::set<OnPair> on;
  std::set<Block> on_table;
  std::set<Block> clear;

  // Builds a consistent state from the support relation alone.
  static BlocksState from_on(const std::set<OnPair>& on, const std::vector<Block>& blocks);

  friend auto operator<=>(const BlocksState&, const BlocksState&) = default;
};

using PlanningState = std::variant<GridState, SokobanState, BlocksState>;

struct GridGoal {
  Coord cell;
  friend auto operator<=>(const GridGoal&, const GridGoal&) = default;
};

struct SokobanGoal {
  Coord box_target;
  friend auto operator<=>(const SokobanGoal&, const SokobanGoal&) = default;
};

struct BlocksGoal {
  std::set<OnPair> on;
  friend auto operator<=>(const BlocksGoal&, const BlocksGoal&) = default;
};

using Goal = std::variant<GridGoal, SokobanGoal, BlocksGoal>;

// Enumerator order is the canonical serialization order: moves (N, S, E, W),
// then pushes, then block actions, which sort lexicographically by name.
enum class ActionKind : std::uint8_t {
  move_north,
  move_south,
  move_east,
  move_west,
  push_north,
  push_south,
  push_east,
  push_west,
  move_b_to_b,
  move_b_to_t,
  move_t_to_b,
};

struct Action {
  ActionKind kind = ActionKind::move_north;
  Block moved = 0;  // block actions only
  Block from = 0;   // move-b-to-b, move-b-to-t
  Block to = 0;     // move-b-to-b, move-t-to-b

  static constexpr Action move(Direction d) {
    return {static_cast<ActionKind>(static_cast<int>(ActionKind::move_north) + static_cast<int>(d))};
  }
  static constexpr Action push(Direction d) {
    return {static_cast<ActionKind>(static_cast<int>(ActionKind::push_north) + static_cast<int>(d))};
  }
  static constexpr Action b_to_b(Block m, Block f, Block t) { return {ActionKind::move_b_to_b, m, f, t}; }
  static constexpr Action b_to_t(Block m, Block f) { return {ActionKind::move_b_to_t, m, f, 0}; }
  static constexpr Action t_to_b(Block m, Block t) { return {ActionKind::move_t_to_b, m, 0, t}; }

  bool is_move() const noexcept { return kind <= ActionKind::move_west; }
  bool is_push() const noexcept { return kind >= ActionKind::push_north && kind <= ActionKind::push_west; }
  bool is_block() const noexcept { return kind >= ActionKind::move_b_to_b; }
  // Direction of a move or push action.
  Direction direction() const noexcept { return static_cast<Direction>(static_cast<int>(kind) % 4); }

  friend constexpr auto operator<=>(const Action&, const Action&) = default;
};

// "move-north", "push-east", "move-b-to-b(A, B, C)".
std::string to_string(const Action& a);
// Accepts canonical names and underscore spellings ("move_north").
std::optional<Action> parse_action(std::string_view text);

struct ProblemInstance {
  std::string id;
  std::string domain_name;
  Environment env;
  PlanningState initial;
  Goal goal;

  DomainKind kind() const { return kind_of(env); }
  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

// Canonical domain name written into problem text ("gridworld-10x10").
std::string domain_name_for(const Environment& env);

// Throws InvalidState naming the violated invariant.
void validate_state(const PlanningState& state, const Environment& env);
void validate_goal(const Goal& goal, const Environment& env);

// Applicable actions in canonical order.
std::vector<Action> applicable_actions(const PlanningState& state, const Environment& env);

// Throws PreconditionViolation when `action` is not applicable.
PlanningState apply_action(const PlanningState& state, const Action& action, const Environment& env);

// Throws DomainMismatch when state and goal belong to different domains.
bool at_goal(const PlanningState& state, const Goal& goal);

// True iff no action sequence from `state` places the box on the target.
bool is_trap(const SokobanState& state, const GridSpec& spec, const SokobanGoal& goal);

// Exhaustive forward search from the problem's initial state.
bool is_solvable(const ProblemInstance& p);

// Every configuration of the given blocks, in a deterministic order.
std::vector<BlocksState> enumerate_block_states(const std::vector<Block>& blocks);

// Bidirectional map between states of one environment and dense indices.
class StateIndexer {
 public:
  explicit StateIndexer(const Environment& env);

  std::size_t size() const noexcept { return size_; }
  const Environment& environment() const noexcept { return env_; }
  // nullopt for states that are invalid in the environment.
  std::optional<std::size_t> index_of(const PlanningState& s) const;
  PlanningState state_at(std::size_t i) const;
  bool valid(std::size_t i) const;

 private:
  Environment env_;
  std::size_t size_ = 0;
  std::vector<BlocksState> blocks_states_;
  std::vector<std::string> blocks_keys_;  // sorted, parallel to blocks_order_
  std::vector<std::size_t> blocks_order_;
};

struct GenerateParams {
  int size = 0;              // grid width/height; 0 selects the domain default
  int n_blocks = 5;
  double wall_density = 0.2;  // Sokoban layouts only
  int max_attempts = 1000;
};

// 0 for BlocksWorld.
int default_grid_size(DomainKind kind);

ProblemInstance generate_problem(DomainKind kind, std::uint64_t seed, const GenerateParams& params = {});

// Bordered ASCII layout: `.` open, `#` wall, `$` box, `o` box target,
// `*` box on target. Throws UnsupportedDomain for BlocksWorld.
std::string render_ascii(const Environment& env, const PlanningState& state, const Goal& goal);

// Manhattan distance between start and goal as used for retrieval
// similarity; for BlocksWorld, the number of unsatisfied goal pairs.
int start_goal_distance(const ProblemInstance& p);

}  // namespace licl
