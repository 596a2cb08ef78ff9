#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "licl/domain.hpp"

namespace licl {

// Python literal as it appears in traces and doctests: None, True/False,
// integers, quoted strings, tuples, lists, sets and dicts.
class Value {
 public:
  enum class Kind : std::uint8_t { none, boolean, integer, string, tuple, list, set, dict };

  Value() = default;
  static Value none() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value string(std::string s);
  static Value tuple(std::vector<Value> items);
  static Value list(std::vector<Value> items);
  static Value set(std::vector<Value> items);
  static Value dict(std::vector<std::pair<Value, Value>> entries);

  Kind kind() const noexcept { return kind_; }
  bool is(Kind k) const noexcept { return kind_ == k; }
  bool is_sequence() const noexcept { return kind_ == Kind::tuple || kind_ == Kind::list || kind_ == Kind::set; }

  bool as_bool() const;
  std::int64_t as_int() const;
  const std::string& as_string() const;
  const std::vector<Value>& items() const;
  const std::vector<std::pair<Value, Value>>& entries() const;
  // Dict lookup by string key; nullptr when absent or not a dict.
  const Value* find(std::string_view key) const;

  // Structural equality; sets and dicts compare order-insensitively.
  friend bool operator==(const Value& a, const Value& b);

 private:
  Kind kind_ = Kind::none;
  bool bool_ = false;
  std::int64_t int_ = 0;
  std::string str_;
  std::vector<Value> items_;
  std::vector<std::pair<Value, Value>> entries_;
};

// Python repr. Sets render in stored order; the empty set renders as set().
std::string render(const Value& v);
std::string python_quote(std::string_view s);

// Throws ParseError on malformed input or trailing text.
Value parse_value(std::string_view text);
std::optional<Value> try_parse_value(std::string_view text);

struct Argument {
  std::string name;  // empty for positional arguments
  Value value;
};

// Parses the inside of a call's parentheses: "(9, 5), 'move-north', goal=(5, 10)".
std::vector<Argument> parse_arguments(std::string_view text);

// Domain values <-> literals, in the shapes used by traces.
Value state_to_value(const PlanningState& s);
PlanningState state_from_value(const Value& v, const Environment& env);
Value goal_to_value(const Goal& g, const Environment& env);
Goal goal_from_value(const Value& v, const Environment& env);
Value action_to_value(const Action& a);
Action action_from_value(const Value& v);
Value actions_to_list(const std::vector<Action>& actions);
Value actions_to_set(const std::vector<Action>& actions);
// Accepts lists, tuples and sets of action strings; result is sorted and unique.
std::vector<Action> action_set_from_value(const Value& v);

}  // namespace licl
