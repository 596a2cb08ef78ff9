#include <algorithm>
#include <deque>

#include <fmt/core.h>

#include "licl/domain.hpp"
#include "licl/errors.hpp"
#include "licl/util.hpp"

namespace licl {

namespace {

std::string id_prefix(DomainKind kind) {
  switch (kind) {
    case DomainKind::two_room: return "gw";
    case DomainKind::maze: return "maze";
    case DomainKind::sokoban_grid: return "sg";
    case DomainKind::full_sokoban: return "sok";
    case DomainKind::blocksworld: return "bw";
  }
  return "p";
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.below(v.size())];
}

GridSpec two_room_layout(int n, std::uint64_t seed, Rng& rng) {
  GridSpec g(DomainKind::two_room, n, n, seed);
  const int col = n / 2 + 1;
  const int door = rng.range(1, n);
  for (int y = 1; y <= n; ++y) {
    if (y != door) g.set_wall({col, y});
  }
  return g;
}

GridSpec maze_layout(int n, std::uint64_t seed, Rng& rng) {
  GridSpec g(DomainKind::maze, n, n, seed);
  for (int i = 0; i < g.cell_count(); ++i) g.set_wall(g.coord(i));
  const auto open_neighbours = [&](Coord c) {
    int k = 0;
    for (Direction d : kDirections) k += g.is_open(step(c, d)) ? 1 : 0;
    return k;
  };
  const Coord start{rng.range(1, n), rng.range(1, n)};
  g.set_wall(start, false);
  std::vector<Coord> stack{start};
  while (!stack.empty()) {
    const Coord cur = stack.back();
    std::vector<Coord> options;
    for (Direction d : kDirections) {
      const Coord nb = step(cur, d);
      if (g.is_wall(nb) && open_neighbours(nb) == 1) options.push_back(nb);
    }
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    const Coord next = pick(rng, options);
    g.set_wall(next, false);
    stack.push_back(next);
  }
  return g;
}

// Bordered room with random interior obstacles, trimmed to its largest
// connected open region.
GridSpec room_layout(DomainKind kind, int n, double density, std::uint64_t seed, Rng& rng) {
  GridSpec g(kind, n, n, seed);
  for (int y = 1; y <= n; ++y) {
    for (int x = 1; x <= n; ++x) {
      const bool border = x == 1 || y == 1 || x == n || y == n;
      if (border || rng.chance(density)) g.set_wall({x, y});
    }
  }
  std::vector<int> component(static_cast<std::size_t>(g.cell_count()), -1);
  int best = -1;
  std::size_t best_size = 0;
  int label = 0;
  for (const Coord c : g.open_cells()) {
    if (component[g.index(c)] >= 0) continue;
    std::size_t size = 0;
    std::deque<Coord> queue{c};
    component[g.index(c)] = label;
    while (!queue.empty()) {
      const Coord cur = queue.front();
      queue.pop_front();
      ++size;
      for (Direction d : kDirections) {
        const Coord nb = step(cur, d);
        if (g.is_open(nb) && component[g.index(nb)] < 0) {
          component[g.index(nb)] = label;
          queue.push_back(nb);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = label;
    }
    ++label;
  }
  for (int i = 0; i < g.cell_count(); ++i) {
    if (component[i] != best) g.set_wall(g.coord(i));
  }
  return g;
}

std::vector<Block> block_names(int n) {
  if (n < 1 || n > 26) throw GenerationError(fmt::format("n_blocks must be in [1, 26], got {}", n));
  std::vector<Block> out;
  for (int i = 0; i < n; ++i) out.push_back(static_cast<Block>('A' + i));
  return out;
}

}  // namespace

int default_grid_size(DomainKind kind) {
  switch (kind) {
    case DomainKind::two_room: return 8;
    case DomainKind::maze: return 10;
    case DomainKind::sokoban_grid: return 10;
    case DomainKind::full_sokoban: return 8;
    case DomainKind::blocksworld: break;
  }
  return 0;
}

ProblemInstance generate_problem(DomainKind kind, std::uint64_t seed, const GenerateParams& params) {
  if (params.max_attempts < 1) throw GenerationError("max_attempts must be positive");
  Rng rng(seed ^ (static_cast<std::uint64_t>(kind) + 1) * 0x9e3779b97f4a7c15ULL);
  ProblemInstance p;
  p.id = fmt::format("{}-task-{}", id_prefix(kind), seed);

  if (kind == DomainKind::blocksworld) {
    const auto blocks = block_names(params.n_blocks);
    const auto states = enumerate_block_states(blocks);
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
      const BlocksState& init = pick(rng, states);
      const BlocksState& target = pick(rng, states);
      BlocksGoal goal{target.on};
      if (at_goal(init, goal)) continue;
      p.env = BlocksSpec{blocks};
      p.domain_name = domain_name_for(p.env);
      p.initial = init;
      p.goal = goal;
      if (is_solvable(p)) return p;
    }
    throw GenerationError(fmt::format("no BlocksWorld instance after {} attempts", params.max_attempts));
  }

  const int n = params.size > 0 ? params.size : default_grid_size(kind);
  if (n < 3) throw GenerationError(fmt::format("grid size {} is too small", n));
  if (params.wall_density < 0.0 || params.wall_density >= 1.0) {
    throw GenerationError("wall_density must be in [0, 1)");
  }

  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    GridSpec g;
    switch (kind) {
      case DomainKind::two_room: g = two_room_layout(n, seed, rng); break;
      case DomainKind::maze: g = maze_layout(n, seed, rng); break;
      default: g = room_layout(kind, n, params.wall_density, seed, rng); break;
    }
    const auto open = g.open_cells();
    if (open.size() < 3) continue;

    if (kind == DomainKind::two_room) {
      const int col = n / 2 + 1;
      std::vector<Coord> left;
      std::vector<Coord> right;
      for (const Coord c : open) {
        if (c.x < col) left.push_back(c);
        if (c.x > col) right.push_back(c);
      }
      if (rng.chance(0.5)) std::swap(left, right);
      p.initial = GridState{pick(rng, left)};
      p.goal = GridGoal{pick(rng, right)};
    } else if (kind == DomainKind::full_sokoban) {
      std::vector<Coord> cells = open;
      rng.shuffle(cells);
      p.initial = SokobanState{cells[0], cells[1]};
      p.goal = SokobanGoal{cells[2]};
    } else {
      std::vector<Coord> cells = open;
      rng.shuffle(cells);
      p.initial = GridState{cells[0]};
      p.goal = GridGoal{cells[1]};
    }
    p.env = g;
    p.domain_name = domain_name_for(p.env);
    if (is_solvable(p)) return p;
  }
  throw GenerationError(
      fmt::format("no solvable {} instance for seed {} after {} attempts", to_string(kind), seed, params.max_attempts));
}

}  // namespace licl
