#include "licl/domain.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>

#include <fmt/core.h>

#include "licl/errors.hpp"

namespace licl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::north: return "north";
    case Direction::south: return "south";
    case Direction::east: return "east";
    case Direction::west: return "west";
  }
  return "?";
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const GridSpec& require_grid(const Environment& env, std::string_view what) {
  if (const auto* g = std::get_if<GridSpec>(&env)) return *g;
  throw DomainMismatch(fmt::format("{} requires a grid environment", what));
}

const BlocksSpec& require_blocks(const Environment& env, std::string_view what) {
  if (const auto* b = std::get_if<BlocksSpec>(&env)) return *b;
  throw DomainMismatch(fmt::format("{} requires a BlocksWorld environment", what));
}

std::optional<Block> support_of(const BlocksState& s, Block b) {
  for (const auto& [upper, lower] : s.on) {
    if (upper == b) return lower;
  }
  return std::nullopt;
}

std::optional<std::string> blocks_state_error(const BlocksState& s, const BlocksSpec& spec) {
  const auto known = [&](Block b) {
    return std::binary_search(spec.blocks.begin(), spec.blocks.end(), b);
  };
  std::map<Block, int> supports;
  std::map<Block, int> above;
  for (const auto& [upper, lower] : s.on) {
    if (!known(upper) || !known(lower)) {
      return fmt::format("on({}, {}) mentions an unknown block", upper, lower);
    }
    if (upper == lower) return fmt::format("block {} cannot be on itself", upper);
    ++supports[upper];
    ++above[lower];
  }
  for (Block b : s.on_table) {
    if (!known(b)) return fmt::format("on-table({}) mentions an unknown block", b);
    ++supports[b];
  }
  for (Block b : s.clear) {
    if (!known(b)) return fmt::format("clear({}) mentions an unknown block", b);
  }
  for (Block b : spec.blocks) {
    const int n = supports.count(b) ? supports[b] : 0;
    if (n != 1) {
      return fmt::format("block {} must be either on exactly one block or on the table (found {} supports)", b, n);
    }
    const int a = above.count(b) ? above[b] : 0;
    if (a > 1) return fmt::format("block {} has {} blocks on it", b, a);
    const bool is_clear = s.clear.count(b) != 0;
    if (is_clear != (a == 0)) {
      return fmt::format("clear({}) is {} but {} block(s) are on it", b, is_clear ? "set" : "unset", a);
    }
  }
  // Walking down from any block must reach the table.
  for (Block b : spec.blocks) {
    Block cur = b;
    std::size_t steps = 0;
    while (auto below = support_of(s, cur)) {
      cur = *below;
      if (++steps > spec.blocks.size()) return fmt::format("the on-relation has a cycle through block {}", b);
    }
  }
  return std::nullopt;
}

std::optional<std::string> state_error(const PlanningState& state, const Environment& env) {
  return std::visit(
      overloaded{
          [&](const GridState& s) -> std::optional<std::string> {
            const auto* g = std::get_if<GridSpec>(&env);
            if (!g) return "grid state used with a BlocksWorld environment";
            if (g->kind() == DomainKind::full_sokoban) return "full Sokoban requires an (agent, box) state";
            if (!g->in_bounds(s.agent)) return fmt::format("agent {} is out of bounds", to_string(s.agent));
            if (g->is_wall(s.agent)) return fmt::format("agent {} is on a wall", to_string(s.agent));
            return std::nullopt;
          },
          [&](const SokobanState& s) -> std::optional<std::string> {
            const auto* g = std::get_if<GridSpec>(&env);
            if (!g || g->kind() != DomainKind::full_sokoban) return "(agent, box) state requires a full Sokoban grid";
            if (!g->in_bounds(s.agent)) return fmt::format("agent {} is out of bounds", to_string(s.agent));
            if (!g->in_bounds(s.box)) return fmt::format("box {} is out of bounds", to_string(s.box));
            if (g->is_wall(s.agent)) return fmt::format("agent {} is on a wall", to_string(s.agent));
            if (g->is_wall(s.box)) return fmt::format("box {} is on a wall", to_string(s.box));
            if (s.agent == s.box) return fmt::format("agent and box share cell {}", to_string(s.box));
            return std::nullopt;
          },
          [&](const BlocksState& s) -> std::optional<std::string> {
            const auto* b = std::get_if<BlocksSpec>(&env);
            if (!b) return "blocks state used with a grid environment";
            return blocks_state_error(s, *b);
          },
      },
      state);
}

// Raw transition without validation. Returns the failed precondition on error.
std::variant<PlanningState, std::string> transition(const PlanningState& state, const Action& a,
                                                    const Environment& env) {
  using Result = std::variant<PlanningState, std::string>;
  return std::visit(
      overloaded{
          [&](const GridState& s) -> Result {
            if (!a.is_move()) {
              return fmt::format("{} is not a movement action; only move-* actions are valid here", to_string(a));
            }
            const auto& g = std::get<GridSpec>(env);
            const Coord dest = step(s.agent, a.direction());
            if (!g.in_bounds(dest)) {
              return fmt::format("{} from {} would leave the grid", to_string(a), to_string(s.agent));
            }
            if (g.is_wall(dest)) {
              return fmt::format("{} from {} would move into a wall at {}", to_string(a), to_string(s.agent),
                                 to_string(dest));
            }
            return PlanningState{GridState{dest}};
          },
          [&](const SokobanState& s) -> Result {
            const auto& g = std::get<GridSpec>(env);
            if (a.is_block()) return fmt::format("{} is a BlocksWorld action", to_string(a));
            const Coord dest = step(s.agent, a.direction());
            if (a.is_move()) {
              if (!g.in_bounds(dest)) {
                return fmt::format("{} from {} would leave the grid", to_string(a), to_string(s.agent));
              }
              if (g.is_wall(dest)) {
                return fmt::format("{} from {} would move into a wall at {}", to_string(a), to_string(s.agent),
                                   to_string(dest));
              }
              if (dest == s.box) {
                return fmt::format("{} from {} would move into the box at {}; pushing requires push-{}", to_string(a),
                                   to_string(s.agent), to_string(dest), direction_name(a.direction()));
              }
              return PlanningState{SokobanState{dest, s.box}};
            }
            if (dest != s.box) {
              return fmt::format("{} from {} requires the box at {}, but the box is at {}", to_string(a),
                                 to_string(s.agent), to_string(dest), to_string(s.box));
            }
            const Coord beyond = step(s.box, a.direction());
            if (!g.in_bounds(beyond)) {
              return fmt::format("{} would push the box from {} off the grid", to_string(a), to_string(s.box));
            }
            if (g.is_wall(beyond)) {
              return fmt::format("{} would push the box from {} into a wall at {}", to_string(a), to_string(s.box),
                                 to_string(beyond));
            }
            return PlanningState{SokobanState{s.box, beyond}};
          },
          [&](const BlocksState& s) -> Result {
            if (!a.is_block()) return fmt::format("{} is not a BlocksWorld action", to_string(a));
            const auto& spec = std::get<BlocksSpec>(env);
            const auto known = [&](Block b) {
              return std::binary_search(spec.blocks.begin(), spec.blocks.end(), b);
            };
            const auto is_clear = [&](Block b) { return s.clear.count(b) != 0; };
            BlocksState next = s;
            switch (a.kind) {
              case ActionKind::move_b_to_b: {
                if (!known(a.moved) || !known(a.from) || !known(a.to)) {
                  return fmt::format("{} mentions an unknown block", to_string(a));
                }
                if (a.moved == a.to) return fmt::format("{}: the moved block and the target block must differ", to_string(a));
                if (!is_clear(a.moved)) return fmt::format("{}: block {} is not clear", to_string(a), a.moved);
                if (!s.on.count({a.moved, a.from})) {
                  return fmt::format("{}: block {} is not on block {}", to_string(a), a.moved, a.from);
                }
                if (!is_clear(a.to)) return fmt::format("{}: block {} is not clear", to_string(a), a.to);
                next.on.erase({a.moved, a.from});
                next.on.insert({a.moved, a.to});
                next.clear.insert(a.from);
                next.clear.erase(a.to);
                return PlanningState{std::move(next)};
              }
              case ActionKind::move_b_to_t: {
                if (!known(a.moved) || !known(a.from)) return fmt::format("{} mentions an unknown block", to_string(a));
                if (!is_clear(a.moved)) return fmt::format("{}: block {} is not clear", to_string(a), a.moved);
                if (!s.on.count({a.moved, a.from})) {
                  return fmt::format("{}: block {} is not on block {}", to_string(a), a.moved, a.from);
                }
                next.on.erase({a.moved, a.from});
                next.on_table.insert(a.moved);
                next.clear.insert(a.from);
                return PlanningState{std::move(next)};
              }
              case ActionKind::move_t_to_b: {
                if (!known(a.moved) || !known(a.to)) return fmt::format("{} mentions an unknown block", to_string(a));
                if (a.moved == a.to) return fmt::format("{}: the moved block and the target block must differ", to_string(a));
                if (!is_clear(a.moved)) return fmt::format("{}: block {} is not clear", to_string(a), a.moved);
                if (!s.on_table.count(a.moved)) {
                  return fmt::format("{}: block {} is not on the table", to_string(a), a.moved);
                }
                if (!is_clear(a.to)) return fmt::format("{}: block {} is not clear", to_string(a), a.to);
                next.on_table.erase(a.moved);
                next.on.insert({a.moved, a.to});
                next.clear.erase(a.to);
                return PlanningState{std::move(next)};
              }
              default:
                break;
            }
            return fmt::format("{} is not a BlocksWorld action", to_string(a));
          },
      },
      state);
}

}  // namespace

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::two_room: return "two_room";
    case DomainKind::maze: return "maze";
    case DomainKind::sokoban_grid: return "sokoban_grid";
    case DomainKind::full_sokoban: return "full_sokoban";
    case DomainKind::blocksworld: return "blocksworld";
  }
  return "?";
}

DomainKind domain_kind_from_string(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto k : {DomainKind::two_room, DomainKind::maze, DomainKind::sokoban_grid, DomainKind::full_sokoban,
                 DomainKind::blocksworld}) {
    if (n == to_string(k)) return k;
  }
  throw Error(fmt::format("unknown domain kind '{}'", name));
}

std::string to_string(Coord c) { return fmt::format("({}, {})", c.x, c.y); }

GridSpec::GridSpec(DomainKind kind, int width, int height, std::uint64_t seed)
    : kind_(kind), width_(width), height_(height), seed_(seed) {
  if (kind == DomainKind::blocksworld) throw UnsupportedDomain("BlocksWorld has no grid");
  if (width <= 0 || height <= 0) throw Error("grid dimensions must be positive");
  wall_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

void GridSpec::set_wall(Coord c, bool blocked) {
  if (!in_bounds(c)) throw InvalidState(fmt::format("wall {} is outside the grid", to_string(c)));
  wall_[index(c)] = blocked ? 1 : 0;
}

std::vector<Coord> GridSpec::walls() const {
  std::vector<Coord> out;
  for (int i = 0; i < cell_count(); ++i) {
    if (wall_[i]) out.push_back(coord(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Coord> GridSpec::open_cells() const {
  std::vector<Coord> out;
  for (int i = 0; i < cell_count(); ++i) {
    if (!wall_[i]) out.push_back(coord(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t GridSpec::wall_count() const {
  return static_cast<std::size_t>(std::count(wall_.begin(), wall_.end(), std::uint8_t{1}));
}

DomainKind kind_of(const Environment& env) {
  if (const auto* g = std::get_if<GridSpec>(&env)) return g->kind();
  return DomainKind::blocksworld;
}

BlocksState BlocksState::from_on(const std::set<OnPair>& on, const std::vector<Block>& blocks) {
  BlocksState s;
  s.on = on;
  for (Block b : blocks) {
    bool upper = false;
    bool lower = false;
    for (const auto& [u, l] : on) {
      upper = upper || u == b;
      lower = lower || l == b;
    }
    if (!upper) s.on_table.insert(b);
    if (!lower) s.clear.insert(b);
  }
  return s;
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::move_north: return "move-north";
    case ActionKind::move_south: return "move-south";
    case ActionKind::move_east: return "move-east";
    case ActionKind::move_west: return "move-west";
    case ActionKind::push_north: return "push-north";
    case ActionKind::push_south: return "push-south";
    case ActionKind::push_east: return "push-east";
    case ActionKind::push_west: return "push-west";
    case ActionKind::move_b_to_b: return fmt::format("move-b-to-b({}, {}, {})", a.moved, a.from, a.to);
    case ActionKind::move_b_to_t: return fmt::format("move-b-to-t({}, {})", a.moved, a.from);
    case ActionKind::move_t_to_b: return fmt::format("move-t-to-b({}, {})", a.moved, a.to);
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view text) {
  std::string t = trim(text);
  const auto paren = t.find('(');
  std::string name = trim(std::string_view(t).substr(0, paren));
  for (auto& c : name) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  if (paren == std::string::npos) {
    static const std::pair<std::string_view, ActionKind> kSimple[] = {
        {"move-north", ActionKind::move_north}, {"move-south", ActionKind::move_south},
        {"move-east", ActionKind::move_east},   {"move-west", ActionKind::move_west},
        {"push-north", ActionKind::push_north}, {"push-south", ActionKind::push_south},
        {"push-east", ActionKind::push_east},   {"push-west", ActionKind::push_west},
    };
    for (const auto& [n, k] : kSimple) {
      if (name == n) return Action{k};
    }
    return std::nullopt;
  }
  if (t.back() != ')') return std::nullopt;
  std::vector<Block> args;
  std::string inner = t.substr(paren + 1, t.size() - paren - 2);
  std::size_t start = 0;
  while (start <= inner.size()) {
    auto comma = inner.find(',', start);
    if (comma == std::string::npos) comma = inner.size();
    std::string arg = trim(std::string_view(inner).substr(start, comma - start));
    if (arg.size() >= 2 && (arg.front() == '\'' || arg.front() == '"') && arg.back() == arg.front()) {
      arg = arg.substr(1, arg.size() - 2);
    }
    if (arg.size() != 1 || !std::isalpha(static_cast<unsigned char>(arg[0]))) return std::nullopt;
    args.push_back(arg[0]);
    start = comma + 1;
  }
  if (name == "move-b-to-b" && args.size() == 3) return Action::b_to_b(args[0], args[1], args[2]);
  if (name == "move-b-to-t" && args.size() == 2) return Action::b_to_t(args[0], args[1]);
  if (name == "move-t-to-b" && args.size() == 2) return Action::t_to_b(args[0], args[1]);
  return std::nullopt;
}

std::string domain_name_for(const Environment& env) {
  if (const auto* b = std::get_if<BlocksSpec>(&env)) return fmt::format("blocksworld-{}", b->blocks.size());
  const auto& g = std::get<GridSpec>(env);
  switch (g.kind()) {
    case DomainKind::two_room:
    case DomainKind::maze: return fmt::format("gridworld-{}x{}", g.width(), g.height());
    case DomainKind::sokoban_grid: return fmt::format("sokoban-grid-{}x{}", g.width(), g.height());
    case DomainKind::full_sokoban: return fmt::format("sokoban-{}x{}", g.width(), g.height());
    case DomainKind::blocksworld: break;
  }
  return "unknown";
}

void validate_state(const PlanningState& state, const Environment& env) {
  if (auto err = state_error(state, env)) throw InvalidState(*err);
}

void validate_goal(const Goal& goal, const Environment& env) {
  std::visit(overloaded{
                 [&](const GridGoal& g) {
                   const auto& spec = require_grid(env, "grid goal");
                   if (!spec.is_open(g.cell)) {
                     throw InvalidState(fmt::format("goal {} is out of bounds or on a wall", to_string(g.cell)));
                   }
                 },
                 [&](const SokobanGoal& g) {
                   const auto& spec = require_grid(env, "Sokoban goal");
                   if (!spec.is_open(g.box_target)) {
                     throw InvalidState(
                         fmt::format("box target {} is out of bounds or on a wall", to_string(g.box_target)));
                   }
                 },
                 [&](const BlocksGoal& g) {
                   const auto& spec = require_blocks(env, "blocks goal");
                   std::map<Block, int> uppers;
                   std::map<Block, int> lowers;
                   for (const auto& [u, l] : g.on) {
                     if (!std::binary_search(spec.blocks.begin(), spec.blocks.end(), u) ||
                         !std::binary_search(spec.blocks.begin(), spec.blocks.end(), l) || u == l) {
                       throw InvalidState(fmt::format("goal on({}, {}) is not satisfiable", u, l));
                     }
                     if (++uppers[u] > 1) throw InvalidState(fmt::format("goal puts block {} on two blocks", u));
                     if (++lowers[l] > 1) throw InvalidState(fmt::format("goal puts two blocks on block {}", l));
                   }
                   for (const auto& [u, l] : g.on) {
                     Block cur = u;
                     std::size_t steps = 0;
                     for (bool moved = true; moved;) {
                       moved = false;
                       for (const auto& [u2, l2] : g.on) {
                         if (u2 == cur) {
                           cur = l2;
                           moved = true;
                           break;
                         }
                       }
                       if (moved && ++steps > spec.blocks.size()) {
                         throw InvalidState("goal on-relation has a cycle");
                       }
                     }
                     (void)l;
                   }
                 },
             },
             goal);
}

std::vector<Action> applicable_actions(const PlanningState& state, const Environment& env) {
  validate_state(state, env);
  std::vector<Action> out;
  std::visit(overloaded{
                 [&](const GridState& s) {
                   const auto& g = std::get<GridSpec>(env);
                   for (Direction d : kDirections) {
                     if (g.is_open(step(s.agent, d))) out.push_back(Action::move(d));
                   }
                 },
                 [&](const SokobanState& s) {
                   const auto& g = std::get<GridSpec>(env);
                   for (Direction d : kDirections) {
                     const Coord dest = step(s.agent, d);
                     if (dest == s.box) {
                       if (g.is_open(step(s.box, d))) out.push_back(Action::push(d));
                     } else if (g.is_open(dest)) {
                       out.push_back(Action::move(d));
                     }
                   }
                 },
                 [&](const BlocksState& s) {
                   const auto& spec = std::get<BlocksSpec>(env);
                   for (Block m : s.clear) {
                     if (auto f = support_of(s, m)) {
                       out.push_back(Action::b_to_t(m, *f));
                       for (Block t : s.clear) {
                         if (t != m) out.push_back(Action::b_to_b(m, *f, t));
                       }
                     } else {
                       for (Block t : s.clear) {
                         if (t != m) out.push_back(Action::t_to_b(m, t));
                       }
                     }
                   }
                   (void)spec;
                 },
             },
             state);
  std::sort(out.begin(), out.end());
  return out;
}

PlanningState apply_action(const PlanningState& state, const Action& action, const Environment& env) {
  validate_state(state, env);
  auto result = transition(state, action, env);
  if (auto* err = std::get_if<std::string>(&result)) throw PreconditionViolation(*err);
  return std::get<PlanningState>(std::move(result));
}

bool at_goal(const PlanningState& state, const Goal& goal) {
  if (const auto* s = std::get_if<GridState>(&state)) {
    if (const auto* g = std::get_if<GridGoal>(&goal)) return s->agent == g->cell;
  } else if (const auto* s = std::get_if<SokobanState>(&state)) {
    if (const auto* g = std::get_if<SokobanGoal>(&goal)) return s->box == g->box_target;
  } else if (const auto* s = std::get_if<BlocksState>(&state)) {
    if (const auto* g = std::get_if<BlocksGoal>(&goal)) {
      return std::includes(s->on.begin(), s->on.end(), g->on.begin(), g->on.end());
    }
  }
  throw DomainMismatch("state and goal belong to different domains");
}

bool is_trap(const SokobanState& state, const GridSpec& spec, const SokobanGoal& goal) {
  const Environment env = spec;
  validate_state(state, env);
  if (state.box == goal.box_target) return false;
  const int cells = spec.cell_count();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells), 0);
  const auto key = [&](const SokobanState& s) {
    return static_cast<std::size_t>(spec.index(s.agent)) * static_cast<std::size_t>(cells) +
           static_cast<std::size_t>(spec.index(s.box));
  };
  std::deque<SokobanState> queue{state};
  seen[key(state)] = 1;
  while (!queue.empty()) {
    const SokobanState s = queue.front();
    queue.pop_front();
    for (Direction d : kDirections) {
      const Coord dest = step(s.agent, d);
      SokobanState next;
      if (dest == s.box) {
        const Coord beyond = step(s.box, d);
        if (!spec.is_open(beyond)) continue;
        next = {s.box, beyond};
        if (beyond == goal.box_target) return false;
      } else {
        if (!spec.is_open(dest)) continue;
        next = {dest, s.box};
      }
      auto& mark = seen[key(next)];
      if (!mark) {
        mark = 1;
        queue.push_back(next);
      }
    }
  }
  return true;
}

bool is_solvable(const ProblemInstance& p) {
  validate_state(p.initial, p.env);
  validate_goal(p.goal, p.env);
  if (at_goal(p.initial, p.goal)) return true;
  const StateIndexer indexer(p.env);
  std::vector<std::uint8_t> seen(indexer.size(), 0);
  std::deque<PlanningState> queue{p.initial};
  seen[*indexer.index_of(p.initial)] = 1;
  while (!queue.empty()) {
    const PlanningState s = std::move(queue.front());
    queue.pop_front();
    for (const Action& a : applicable_actions(s, p.env)) {
      PlanningState next = std::get<PlanningState>(transition(s, a, p.env));
      if (at_goal(next, p.goal)) return true;
      const auto idx = *indexer.index_of(next);
      if (!seen[idx]) {
        seen[idx] = 1;
        queue.push_back(std::move(next));
      }
    }
  }
  return false;
}

std::vector<BlocksState> enumerate_block_states(const std::vector<Block>& blocks) {
  // Insert blocks one at a time: on a new stack, directly above any placed
  // block, or at the bottom of any existing stack. Each configuration is
  // produced exactly once since removing the last block undoes the step.
  using Stacks = std::vector<std::vector<Block>>;
  std::vector<Stacks> layer{Stacks{}};
  for (Block b : blocks) {
    std::vector<Stacks> next;
    for (const Stacks& st : layer) {
      Stacks fresh = st;
      fresh.push_back({b});
      next.push_back(std::move(fresh));
      for (std::size_t i = 0; i < st.size(); ++i) {
        for (std::size_t j = 0; j < st[i].size(); ++j) {
          Stacks above = st;
          above[i].insert(above[i].begin() + static_cast<std::ptrdiff_t>(j) + 1, b);
          next.push_back(std::move(above));
        }
        Stacks bottom = st;
        bottom[i].insert(bottom[i].begin(), b);
        next.push_back(std::move(bottom));
      }
    }
    layer = std::move(next);
  }
  std::vector<BlocksState> out;
  out.reserve(layer.size());
  for (const Stacks& st : layer) {
    std::set<OnPair> on;
    for (const auto& stack : st) {
      for (std::size_t j = 1; j < stack.size(); ++j) on.insert({stack[j], stack[j - 1]});
    }
    out.push_back(BlocksState::from_on(on, blocks));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string blocks_key(const BlocksState& s, const std::vector<Block>& blocks) {
  std::string key;
  key.reserve(blocks.size());
  for (Block b : blocks) {
    auto below = support_of(s, b);
    key.push_back(below ? *below : '_');
  }
  return key;
}

}  // namespace

StateIndexer::StateIndexer(const Environment& env) : env_(env) {
  if (const auto* g = std::get_if<GridSpec>(&env_)) {
    const auto cells = static_cast<std::size_t>(g->cell_count());
    size_ = g->kind() == DomainKind::full_sokoban ? cells * cells : cells;
    return;
  }
  const auto& spec = std::get<BlocksSpec>(env_);
  blocks_states_ = enumerate_block_states(spec.blocks);
  size_ = blocks_states_.size();
  std::vector<std::pair<std::string, std::size_t>> keyed;
  keyed.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) keyed.emplace_back(blocks_key(blocks_states_[i], spec.blocks), i);
  std::sort(keyed.begin(), keyed.end());
  for (auto& [k, i] : keyed) {
    blocks_keys_.push_back(std::move(k));
    blocks_order_.push_back(i);
  }
}

std::optional<std::size_t> StateIndexer::index_of(const PlanningState& s) const {
  if (state_error(s, env_)) return std::nullopt;
  if (const auto* g = std::get_if<GridSpec>(&env_)) {
    if (const auto* gs = std::get_if<GridState>(&s)) return static_cast<std::size_t>(g->index(gs->agent));
    const auto& ss = std::get<SokobanState>(s);
    return static_cast<std::size_t>(g->index(ss.agent)) * static_cast<std::size_t>(g->cell_count()) +
           static_cast<std::size_t>(g->index(ss.box));
  }
  const auto& spec = std::get<BlocksSpec>(env_);
  const std::string key = blocks_key(std::get<BlocksState>(s), spec.blocks);
  auto it = std::lower_bound(blocks_keys_.begin(), blocks_keys_.end(), key);
  if (it == blocks_keys_.end() || *it != key) return std::nullopt;
  return blocks_order_[static_cast<std::size_t>(it - blocks_keys_.begin())];
}

PlanningState StateIndexer::state_at(std::size_t i) const {
  if (const auto* g = std::get_if<GridSpec>(&env_)) {
    if (g->kind() != DomainKind::full_sokoban) return GridState{g->coord(static_cast<int>(i))};
    const auto cells = static_cast<std::size_t>(g->cell_count());
    return SokobanState{g->coord(static_cast<int>(i / cells)), g->coord(static_cast<int>(i % cells))};
  }
  return blocks_states_.at(i);
}

bool StateIndexer::valid(std::size_t i) const {
  if (i >= size_) return false;
  if (const auto* g = std::get_if<GridSpec>(&env_)) {
    if (g->kind() != DomainKind::full_sokoban) return g->is_open(g->coord(static_cast<int>(i)));
    const auto cells = static_cast<std::size_t>(g->cell_count());
    const auto a = static_cast<int>(i / cells);
    const auto b = static_cast<int>(i % cells);
    return a != b && g->is_open(g->coord(a)) && g->is_open(g->coord(b));
  }
  return true;
}

int start_goal_distance(const ProblemInstance& p) {
  const auto manhattan = [](Coord a, Coord b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); };
  if (const auto* s = std::get_if<GridState>(&p.initial)) {
    return manhattan(s->agent, std::get<GridGoal>(p.goal).cell);
  }
  if (const auto* s = std::get_if<SokobanState>(&p.initial)) {
    return manhattan(s->box, std::get<SokobanGoal>(p.goal).box_target);
  }
  const auto& s = std::get<BlocksState>(p.initial);
  const auto& g = std::get<BlocksGoal>(p.goal);
  return static_cast<int>(std::count_if(g.on.begin(), g.on.end(), [&](const OnPair& pr) { return !s.on.count(pr); }));
}

}  // namespace licl
