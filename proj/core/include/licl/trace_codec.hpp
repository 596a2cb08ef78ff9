#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "licl/domain.hpp"
#include "licl/value.hpp"

namespace licl {

struct SubroutineCall {
  std::string name;
  std::string raw_args;
  std::optional<std::vector<Argument>> args;  // absent when raw_args failed to parse
  std::optional<std::string> raw_output;      // absent for a Calling line with no return
  std::optional<Value> output;
  std::pair<std::size_t, std::size_t> line_span;  // byte range of the Calling line

  bool complete() const { return raw_output.has_value(); }
};

struct Trace {
  std::vector<SubroutineCall> calls;
  std::optional<std::vector<Action>> final_answer;
  std::string source;
  std::vector<std::string> diagnostics;
};

// Pairs "Calling f(...)..." with the next "...f returned v" line; never throws.
Trace parse_trace(std::string_view text);

// Plan extraction for free-form answers: documented answer-line patterns
// first, then a comma-separated action line, then every action token in the
// text. Returns an empty list when nothing is found.
std::vector<Action> parse_action_sequence(std::string_view text);

// Token normalization shared by every plan parser ("up" -> move-north).
std::optional<Action> normalize_action_token(std::string_view token);

std::string render_call_line(std::string_view name, const std::vector<Value>& args);
std::string render_return_line(std::string_view name, const Value& output);
// Both lines, newline separated, no trailing newline.
std::string render_call(std::string_view name, const std::vector<Value>& args, const Value& output);
// "Final answer: a b c" followed by the list repr.
std::string render_final_answer(const std::vector<Action>& plan);

}  // namespace licl
