#include <algorithm>

#include <fmt/core.h>

#include "licl/domain.hpp"
#include "licl/errors.hpp"

namespace licl {

std::string render_ascii(const Environment& env, const PlanningState& state, const Goal& goal) {
  const auto* spec = std::get_if<GridSpec>(&env);
  if (!spec) throw UnsupportedDomain("BlocksWorld has no grid layout");
  validate_state(state, env);

  std::optional<Coord> box;
  std::optional<Coord> target;
  if (const auto* s = std::get_if<SokobanState>(&state)) box = s->box;
  if (const auto* g = std::get_if<SokobanGoal>(&goal)) target = g->box_target;

  const int w = std::max(2, static_cast<int>(fmt::format("{}", spec->height()).size()));
  std::string out;

  std::string header(static_cast<std::size_t>(w + 3), ' ');
  for (int x = 1; x <= spec->width(); ++x) header += fmt::format("{:<4}", x);
  while (!header.empty() && header.back() == ' ') header.pop_back();
  out += header;
  out += '\n';

  std::string rule(static_cast<std::size_t>(w + 1), ' ');
  for (int x = 1; x <= spec->width(); ++x) rule += "+---";
  rule += "+\n";
  out += rule;

  for (int y = spec->height(); y >= 1; --y) {
    out += fmt::format("{:>{}} ", y, w);
    for (int x = 1; x <= spec->width(); ++x) {
      const Coord c{x, y};
      char sym = '.';
      if (spec->is_wall(c)) {
        sym = '#';
      } else if (box && *box == c) {
        sym = target && *target == c ? '*' : '$';
      } else if (target && *target == c) {
        sym = 'o';
      }
      out += "| ";
      out += sym;
      out += ' ';
    }
    out += "|\n";
    out += rule;
  }
  return out;
}

}  // namespace licl
