#pragma once

// Reference implementations used only by tests. They read raw cell data
// from GridSpec and block lists from BlocksSpec but never call the search,
// oracle or validation code they are compared against.

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "licl/domain.hpp"

namespace testing_oracles {

using licl::Coord;
using licl::GridSpec;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) { return slurp(std::string(FIXTURE_DIR) + "/" + name); }

constexpr int kDx[4] = {0, 0, 1, -1};  // N, S, E, W
constexpr int kDy[4] = {1, -1, 0, 0};
inline const char* const kMoveNames[4] = {"move-north", "move-south", "move-east", "move-west"};
inline const char* const kPushNames[4] = {"push-north", "push-south", "push-east", "push-west"};

inline Coord moved(Coord c, int d) { return {c.x + kDx[d], c.y + kDy[d]}; }

inline bool open(const GridSpec& g, Coord c) {
  return c.x >= 1 && c.y >= 1 && c.x <= g.width() && c.y <= g.height() && !g.is_wall(c);
}

// BFS distance from every cell to `goal`; -1 where unreachable or blocked.
inline std::map<Coord, int> grid_bfs(const GridSpec& g, Coord goal) {
  std::map<Coord, int> dist;
  if (!open(g, goal)) return dist;
  std::deque<Coord> q{goal};
  dist[goal] = 0;
  while (!q.empty()) {
    const Coord c = q.front();
    q.pop_front();
    for (int d = 0; d < 4; ++d) {
      const Coord n = moved(c, d);
      if (open(g, n) && !dist.count(n)) {
        dist[n] = dist[c] + 1;
        q.push_back(n);
      }
    }
  }
  return dist;
}

// Simple paths only: a shortest plan never revisits a cell.
inline bool reaches_in_exactly(const GridSpec& g, Coord c, Coord goal, int steps, std::set<Coord>& path) {
  if (steps == 0) return c == goal;
  if (std::abs(c.x - goal.x) + std::abs(c.y - goal.y) > steps) return false;
  path.insert(c);
  bool found = false;
  for (int d = 0; d < 4 && !found; ++d) {
    const Coord n = moved(c, d);
    if (open(g, n) && !path.count(n)) found = reaches_in_exactly(g, n, goal, steps - 1, path);
  }
  path.erase(c);
  return found;
}

// First actions of every shortest plan, found by depth-bounded DFS.
inline std::set<std::string> brute_force_optimal_first(const GridSpec& g, Coord s, Coord goal) {
  std::set<std::string> out;
  const auto dist = grid_bfs(g, goal);
  const auto it = dist.find(s);
  if (it == dist.end() || it->second == 0) return out;
  const int depth = it->second;
  for (int d = 0; d < 4; ++d) {
    const Coord n = moved(s, d);
    std::set<Coord> path{s};
    if (open(g, n) && reaches_in_exactly(g, n, goal, depth - 1, path)) out.insert(kMoveNames[d]);
  }
  return out;
}

struct TreeCheck {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  bool connected = false;
};

inline TreeCheck maze_graph(const GridSpec& g) {
  TreeCheck t;
  std::optional<Coord> any;
  for (int y = 1; y <= g.height(); ++y) {
    for (int x = 1; x <= g.width(); ++x) {
      const Coord c{x, y};
      if (!open(g, c)) continue;
      ++t.vertices;
      any = c;
      if (open(g, {x + 1, y})) ++t.edges;
      if (open(g, {x, y + 1})) ++t.edges;
    }
  }
  if (any) t.connected = grid_bfs(g, *any).size() == t.vertices;
  return t;
}

// Parses the bordered ASCII rendering of a maze ("10 | . | # | ..." rows).
inline GridSpec load_ascii_maze(const std::string& text, int width, int height) {
  GridSpec g(licl::DomainKind::maze, width, height);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto bar = line.find('|');
    if (bar == std::string::npos || bar < 2) continue;
    int y = 0;
    try {
      y = std::stoi(line.substr(0, bar));
    } catch (...) {
      continue;
    }
    for (int x = 1; x <= width; ++x) {
      const std::size_t at = bar + 4 * static_cast<std::size_t>(x) - 2;
      if (at < line.size() && line[at] == '#') g.set_wall({x, y});
    }
  }
  return g;
}

// Joint (agent, box) space of a single-box Sokoban puzzle.
struct SokobanSpace {
  using Node = std::pair<Coord, Coord>;
  std::vector<Node> nodes;
  std::map<Node, bool> trap;  // true when no box-on-target node is reachable
};

inline std::optional<std::pair<Coord, Coord>> sokoban_move(const GridSpec& g, Coord agent, Coord box, int d) {
  const Coord n = moved(agent, d);
  if (!open(g, n)) return std::nullopt;
  if (n == box) {
    const Coord b2 = moved(box, d);
    if (!open(g, b2)) return std::nullopt;
    return std::make_pair(n, b2);
  }
  return std::make_pair(n, box);
}

inline SokobanSpace sokoban_space(const GridSpec& g, Coord agent, Coord box, Coord target) {
  using Node = SokobanSpace::Node;
  SokobanSpace sp;
  std::map<Node, std::vector<Node>> reverse;
  std::set<Node> seen{{agent, box}};
  std::deque<Node> q{{agent, box}};
  while (!q.empty()) {
    const Node cur = q.front();
    q.pop_front();
    sp.nodes.push_back(cur);
    for (int d = 0; d < 4; ++d) {
      const auto nx = sokoban_move(g, cur.first, cur.second, d);
      if (!nx) continue;
      reverse[*nx].push_back(cur);
      if (seen.insert(*nx).second) q.push_back(*nx);
    }
  }
  std::set<Node> good;
  std::deque<Node> back;
  for (const Node& n : sp.nodes) {
    if (n.second == target) {
      good.insert(n);
      back.push_back(n);
    }
  }
  while (!back.empty()) {
    const Node cur = back.front();
    back.pop_front();
    for (const Node& pr : reverse[cur]) {
      if (good.insert(pr).second) back.push_back(pr);
    }
  }
  for (const Node& n : sp.nodes) sp.trap[n] = !good.count(n);
  return sp;
}

// Independent plan checker over all five domains.
struct PlanVerdict {
  bool valid = false;
  bool success = false;
  bool optimal = false;
  int first_error = 0;  // 1-based, 0 when valid
};

// Blocks state as block -> support ('_' for the table).
using Tower = std::map<char, char>;

inline bool tower_clear(const Tower& t, char b) {
  for (const auto& [x, s] : t) {
    if (s == b) return false;
  }
  return true;
}

inline std::optional<Tower> tower_apply(const Tower& t, const licl::Action& a) {
  using K = licl::ActionKind;
  const auto has = [&](char b) { return t.count(b) > 0; };
  if (!has(a.moved) || !tower_clear(t, a.moved)) return std::nullopt;
  Tower n = t;
  switch (a.kind) {
    case K::move_b_to_b:
      if (!has(a.from) || !has(a.to) || t.at(a.moved) != a.from || a.to == a.moved || !tower_clear(t, a.to)) {
        return std::nullopt;
      }
      n[a.moved] = a.to;
      return n;
    case K::move_b_to_t:
      if (!has(a.from) || t.at(a.moved) != a.from) return std::nullopt;
      n[a.moved] = '_';
      return n;
    case K::move_t_to_b:
      if (!has(a.to) || t.at(a.moved) != '_' || a.to == a.moved || !tower_clear(t, a.to)) return std::nullopt;
      n[a.moved] = a.to;
      return n;
    default: return std::nullopt;
  }
}

inline Tower tower_of(const licl::BlocksState& s, const std::vector<char>& blocks) {
  Tower t;
  for (char b : blocks) t[b] = '_';
  for (const auto& [u, l] : s.on) t[u] = l;
  return t;
}

inline bool tower_goal(const Tower& t, const licl::BlocksGoal& g) {
  for (const auto& [u, l] : g.on) {
    if (!t.count(u) || t.at(u) != l) return false;
  }
  return true;
}

inline std::vector<licl::Action> tower_moves(const Tower& t) {
  std::vector<licl::Action> out;
  for (const auto& [b, s] : t) {
    if (!tower_clear(t, b)) continue;
    if (s != '_') out.push_back(licl::Action::b_to_t(b, s));
    for (const auto& [c, cs] : t) {
      if (c == b || !tower_clear(t, c)) continue;
      out.push_back(s == '_' ? licl::Action::t_to_b(b, c) : licl::Action::b_to_b(b, s, c));
    }
  }
  return out;
}

inline int tower_optimal_length(const Tower& start, const licl::BlocksGoal& g) {
  std::map<Tower, int> dist{{start, 0}};
  std::deque<Tower> q{start};
  while (!q.empty()) {
    const Tower cur = q.front();
    q.pop_front();
    if (tower_goal(cur, g)) return dist[cur];
    for (const auto& a : tower_moves(cur)) {
      const auto n = tower_apply(cur, a);
      if (n && !dist.count(*n)) {
        dist[*n] = dist[cur] + 1;
        q.push_back(*n);
      }
    }
  }
  return -1;
}

inline int sokoban_optimal_length(const GridSpec& g, Coord agent, Coord box, Coord target) {
  using Node = std::pair<Coord, Coord>;
  std::map<Node, int> dist{{{agent, box}, 0}};
  std::deque<Node> q{{agent, box}};
  while (!q.empty()) {
    const Node cur = q.front();
    q.pop_front();
    if (cur.second == target) return dist[cur];
    for (int d = 0; d < 4; ++d) {
      const auto n = sokoban_move(g, cur.first, cur.second, d);
      if (n && !dist.count(*n)) {
        dist[*n] = dist[cur] + 1;
        q.push_back(*n);
      }
    }
  }
  return -1;
}

inline int direction_index(const licl::Action& a) {
  return static_cast<int>(a.kind) % 4;
}

// `known_optimal` skips the search when the caller already has the length.
inline PlanVerdict check_plan(const licl::ProblemInstance& p, const std::vector<licl::Action>& plan,
                              int known_optimal = -1) {
  PlanVerdict v;
  const int n = static_cast<int>(plan.size());
  if (const auto* g = std::get_if<GridSpec>(&p.env)) {
    if (const auto* s = std::get_if<licl::GridState>(&p.initial)) {
      const Coord goal = std::get<licl::GridGoal>(p.goal).cell;
      Coord at = s->agent;
      for (int i = 0; i < n; ++i) {
        const Coord next = moved(at, direction_index(plan[i]));
        if (!plan[i].is_move() || !open(*g, next)) {
          v.first_error = i + 1;
          return v;
        }
        at = next;
      }
      v.valid = true;
      v.success = at == goal;
      v.optimal = v.success && n == (known_optimal >= 0 ? known_optimal : grid_bfs(*g, goal).at(s->agent));
      return v;
    }
    const auto& s = std::get<licl::SokobanState>(p.initial);
    const Coord target = std::get<licl::SokobanGoal>(p.goal).box_target;
    Coord agent = s.agent, box = s.box;
    for (int i = 0; i < n; ++i) {
      const int d = direction_index(plan[i]);
      const auto next = plan[i].is_block() ? std::nullopt : sokoban_move(*g, agent, box, d);
      // a push must move the box and a move must not
      if (!next || (plan[i].is_push() != (next->second != box))) {
        v.first_error = i + 1;
        return v;
      }
      agent = next->first;
      box = next->second;
    }
    v.valid = true;
    v.success = box == target;
    v.optimal = v.success &&
                n == (known_optimal >= 0 ? known_optimal : sokoban_optimal_length(*g, s.agent, s.box, target));
    return v;
  }
  const auto& blocks = std::get<licl::BlocksSpec>(p.env).blocks;
  const auto& goal = std::get<licl::BlocksGoal>(p.goal);
  const Tower start = tower_of(std::get<licl::BlocksState>(p.initial), blocks);
  Tower t = start;
  for (int i = 0; i < n; ++i) {
    const auto next = plan[i].is_block() ? tower_apply(t, plan[i]) : std::nullopt;
    if (!next) {
      v.first_error = i + 1;
      return v;
    }
    t = *next;
  }
  v.valid = true;
  v.success = tower_goal(t, goal);
  v.optimal = v.success && n == (known_optimal >= 0 ? known_optimal : tower_optimal_length(start, goal));
  return v;
}

}  // namespace testing_oracles
