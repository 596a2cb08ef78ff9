#pragma once

#include <string>
#include <string_view>

#include "licl/domain.hpp"

namespace licl {

// Canonical problem text:
//   (define (problem gw-task-351)
//     (:domain gridworld-10x10)
//     (:init (at c9-5))
//     (:goal (at c5-10))
//   )
std::string serialize_problem(const ProblemInstance& p);

// Throws ParseError (with byte offset) for malformed text and InvalidState
// when the facts do not describe a valid state of `env`.
ProblemInstance parse_problem(std::string_view text, const Environment& env);

struct ProblemHeader {
  std::string id;
  std::string domain_name;
};

ProblemHeader parse_problem_header(std::string_view text);

// Collapses whitespace runs and strips space next to parentheses, so texts
// that differ only in layout compare equal.
std::string normalize_problem_text(std::string_view text);

// JSON sidecar carrying what the problem text omits (grid size, walls, blocks).
std::string environment_to_json(const Environment& env);
Environment environment_from_json(std::string_view json);

}  // namespace licl
