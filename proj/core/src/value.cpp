#include "licl/value.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/core.h>

#include "licl/errors.hpp"

namespace licl {

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::boolean;
  v.bool_ = b;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::integer;
  v.int_ = i;
  return v;
}

Value Value::string(std::string s) {
  Value v;
  v.kind_ = Kind::string;
  v.str_ = std::move(s);
  return v;
}

Value Value::tuple(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::tuple;
  v.items_ = std::move(items);
  return v;
}

Value Value::list(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::list;
  v.items_ = std::move(items);
  return v;
}

Value Value::set(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::set;
  v.items_ = std::move(items);
  return v;
}

Value Value::dict(std::vector<std::pair<Value, Value>> entries) {
  Value v;
  v.kind_ = Kind::dict;
  v.entries_ = std::move(entries);
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::boolean) throw Error("value is not a boolean: " + render(*this));
  return bool_;
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::integer) throw Error("value is not an integer: " + render(*this));
  return int_;
}

const std::string& Value::as_string() const {
  if (kind_ != Kind::string) throw Error("value is not a string: " + render(*this));
  return str_;
}

const std::vector<Value>& Value::items() const {
  if (!is_sequence()) throw Error("value is not a sequence: " + render(*this));
  return items_;
}

const std::vector<std::pair<Value, Value>>& Value::entries() const {
  if (kind_ != Kind::dict) throw Error("value is not a dict: " + render(*this));
  return entries_;
}

const Value* Value::find(std::string_view key) const {
  if (kind_ != Kind::dict) return nullptr;
  for (const auto& [k, v] : entries_) {
    if (k.kind_ == Kind::string && k.str_ == key) return &v;
  }
  return nullptr;
}

namespace {

bool contains_all(const std::vector<Value>& a, const std::vector<Value>& b) {
  return std::all_of(b.begin(), b.end(), [&](const Value& x) { return std::find(a.begin(), a.end(), x) != a.end(); });
}

}  // namespace

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::none: return true;
    case Value::Kind::boolean: return a.bool_ == b.bool_;
    case Value::Kind::integer: return a.int_ == b.int_;
    case Value::Kind::string: return a.str_ == b.str_;
    case Value::Kind::tuple:
    case Value::Kind::list: return a.items_ == b.items_;
    case Value::Kind::set: return contains_all(a.items_, b.items_) && contains_all(b.items_, a.items_);
    case Value::Kind::dict: {
      if (a.entries_.size() != b.entries_.size()) return false;
      for (const auto& [k, v] : a.entries_) {
        const auto it = std::find_if(b.entries_.begin(), b.entries_.end(), [&](const auto& e) { return e.first == k; });
        if (it == b.entries_.end() || !(it->second == v)) return false;
      }
      return true;
    }
  }
  return false;
}

std::string python_quote(std::string_view s) {
  const bool has_single = s.find('\'') != std::string_view::npos;
  const bool has_double = s.find('"') != std::string_view::npos;
  const char q = has_single && !has_double ? '"' : '\'';
  std::string out(1, q);
  for (unsigned char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c == q) {
          out += '\\';
          out += static_cast<char>(c);
        } else if (c < 0x20 || c == 0x7f) {
          out += fmt::format("\\x{:02x}", c);
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += q;
  return out;
}

std::string render(const Value& v) {
  const auto join = [](const std::vector<Value>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += render(items[i]);
    }
    return out;
  };
  switch (v.kind()) {
    case Value::Kind::none: return "None";
    case Value::Kind::boolean: return v.as_bool() ? "True" : "False";
    case Value::Kind::integer: return std::to_string(v.as_int());
    case Value::Kind::string: return python_quote(v.as_string());
    case Value::Kind::tuple:
      if (v.items().size() == 1) return "(" + render(v.items()[0]) + ",)";
      return "(" + join(v.items()) + ")";
    case Value::Kind::list: return "[" + join(v.items()) + "]";
    case Value::Kind::set:
      if (v.items().empty()) return "set()";
      return "{" + join(v.items()) + "}";
    case Value::Kind::dict: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, val] : v.entries()) {
        if (!first) out += ", ";
        first = false;
        out += render(k) + ": " + render(val);
      }
      return out + "}";
    }
  }
  return "";
}

namespace {

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view text) : text_(text) {}

  Value parse_all() {
    Value v = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "end of literal", fmt::format("unexpected '{}'", text_[pos_]));
    return v;
  }

  std::vector<Argument> parse_arguments() {
    std::vector<Argument> out;
    skip_ws();
    if (pos_ == text_.size()) return out;
    while (true) {
      Argument arg;
      skip_ws();
      const std::size_t save = pos_;
      std::string ident = identifier();
      skip_ws();
      if (!ident.empty() && peek() == '=' && peek(1) != '=') {
        ++pos_;
        arg.name = std::move(ident);
      } else {
        pos_ = save;
      }
      arg.value = parse();
      out.push_back(std::move(arg));
      skip_ws();
      if (pos_ == text_.size()) break;
      expect(',');
      skip_ws();
      if (pos_ == text_.size()) break;  // trailing comma
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) throw ParseError(pos_, fmt::format("'{}'", c));
    ++pos_;
  }

  std::string identifier() {
    std::string out;
    if (!std::isalpha(static_cast<unsigned char>(peek())) && peek() != '_') return out;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') out += text_[pos_++];
    return out;
  }

  Value parse() {
    if (++depth_ > 64) throw ParseError(pos_, "shallower nesting");
    skip_ws();
    Value v = parse_inner();
    --depth_;
    return v;
  }

  Value parse_inner() {
    const char c = peek();
    if (c == '\'' || c == '"') return Value::string(string_literal());
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return integer();
    if (c == '(') return parenthesized();
    if (c == '[') {
      ++pos_;
      return Value::list(items(']'));
    }
    if (c == '{') return braced();
    const std::size_t start = pos_;
    const std::string ident = identifier();
    if (ident == "None") return Value::none();
    if (ident == "True") return Value::boolean(true);
    if (ident == "False") return Value::boolean(false);
    if (ident == "set" || ident == "frozenset") {
      expect('(');
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return Value::set({});
      }
      Value inner = parse();
      expect(')');
      if (!inner.is_sequence()) throw ParseError(start, "iterable inside set()");
      return Value::set(inner.items());
    }
    pos_ = start;
    throw ParseError(pos_, "literal", c ? fmt::format("found '{}'", c) : "found end of text");
  }

  Value integer() {
    const std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError(pos_, "digit");
    std::int64_t v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      if (v > (INT64_MAX - 9) / 10) throw ParseError(start, "integer within 64 bits");
      v = v * 10 + (text_[pos_++] - '0');
    }
    return Value::integer(text_[start] == '-' ? -v : v);
  }

  std::string string_literal() {
    const char q = text_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) throw ParseError(pos_, fmt::format("closing {}", q));
      const char c = text_[pos_++];
      if (c == q) break;
      if (c == '\n') throw ParseError(pos_ - 1, fmt::format("closing {}", q), "newline inside string");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) throw ParseError(pos_, "escape character");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        case 'x': {
          if (pos_ + 2 > text_.size() || !std::isxdigit(static_cast<unsigned char>(text_[pos_])) ||
              !std::isxdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            throw ParseError(pos_, "two hex digits");
          }
          out += static_cast<char>(std::stoi(std::string(text_.substr(pos_, 2)), nullptr, 16));
          pos_ += 2;
          break;
        }
        default:
          out += '\\';
          out += e;
      }
    }
    return out;
  }

  // Comma-separated values up to `close`; the opening bracket is consumed.
  std::vector<Value> items(char close, bool* trailing_comma = nullptr) {
    std::vector<Value> out;
    skip_ws();
    if (peek() == close) {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(parse());
      skip_ws();
      if (peek() == close) {
        ++pos_;
        if (trailing_comma) *trailing_comma = false;
        return out;
      }
      expect(',');
      skip_ws();
      if (peek() == close) {
        ++pos_;
        if (trailing_comma) *trailing_comma = true;
        return out;
      }
    }
  }

  Value parenthesized() {
    ++pos_;
    bool trailing = false;
    std::vector<Value> v = items(')', &trailing);
    if (v.size() == 1 && !trailing) return v[0];
    return Value::tuple(std::move(v));
  }

  Value braced() {
    ++pos_;
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return Value::dict({});
    }
    Value first = parse();
    skip_ws();
    if (peek() != ':') {
      std::vector<Value> rest{std::move(first)};
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        return Value::set(std::move(rest));
      }
      expect(',');
      for (Value& v : items('}')) rest.push_back(std::move(v));
      return Value::set(std::move(rest));
    }
    std::vector<std::pair<Value, Value>> entries;
    ++pos_;
    entries.emplace_back(std::move(first), parse());
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        return Value::dict(std::move(entries));
      }
      expect(',');
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        return Value::dict(std::move(entries));
      }
      Value k = parse();
      expect(':');
      entries.emplace_back(std::move(k), parse());
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

Coord coord_from_value(const Value& v) {
  if ((!v.is(Value::Kind::tuple) && !v.is(Value::Kind::list)) || v.items().size() != 2 ||
      !v.items()[0].is(Value::Kind::integer) || !v.items()[1].is(Value::Kind::integer)) {
    throw ParseError(0, "coordinate pair (x, y)", render(v));
  }
  return {static_cast<int>(v.items()[0].as_int()), static_cast<int>(v.items()[1].as_int())};
}

Value coord_to_value(Coord c) { return Value::tuple({Value::integer(c.x), Value::integer(c.y)}); }

Block block_from_value(const Value& v) {
  if (!v.is(Value::Kind::string) || v.as_string().size() != 1) throw ParseError(0, "single-letter block name", render(v));
  return v.as_string()[0];
}

Value block_to_value(Block b) { return Value::string(std::string(1, b)); }

std::set<OnPair> on_pairs_from_value(const Value& v) {
  if (!v.is_sequence()) throw ParseError(0, "list of (upper, lower) pairs", render(v));
  std::set<OnPair> out;
  for (const Value& pr : v.items()) {
    if (!pr.is_sequence() || pr.items().size() != 2) throw ParseError(0, "(upper, lower) pair", render(pr));
    out.insert({block_from_value(pr.items()[0]), block_from_value(pr.items()[1])});
  }
  return out;
}

std::set<Block> blocks_from_value(const Value& v) {
  if (!v.is_sequence()) throw ParseError(0, "list of block names", render(v));
  std::set<Block> out;
  for (const Value& b : v.items()) out.insert(block_from_value(b));
  return out;
}

Value blocks_dict(const BlocksState& s) {
  std::vector<Value> on;
  for (const auto& [u, l] : s.on) on.push_back(Value::tuple({block_to_value(u), block_to_value(l)}));
  std::vector<Value> table;
  for (Block b : s.on_table) table.push_back(block_to_value(b));
  std::vector<Value> clear;
  for (Block b : s.clear) clear.push_back(block_to_value(b));
  return Value::dict({{Value::string("on"), Value::list(std::move(on))},
                      {Value::string("on-table"), Value::list(std::move(table))},
                      {Value::string("clear"), Value::list(std::move(clear))}});
}

}  // namespace

Value parse_value(std::string_view text) { return LiteralParser(text).parse_all(); }

std::optional<Value> try_parse_value(std::string_view text) {
  try {
    return parse_value(text);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::vector<Argument> parse_arguments(std::string_view text) { return LiteralParser(text).parse_arguments(); }

Value state_to_value(const PlanningState& s) {
  if (const auto* g = std::get_if<GridState>(&s)) return coord_to_value(g->agent);
  if (const auto* k = std::get_if<SokobanState>(&s)) {
    return Value::tuple({coord_to_value(k->agent), coord_to_value(k->box)});
  }
  return blocks_dict(std::get<BlocksState>(s));
}

PlanningState state_from_value(const Value& v, const Environment& env) {
  PlanningState s;
  if (const auto* b = std::get_if<BlocksSpec>(&env)) {
    if (!v.is(Value::Kind::dict)) throw ParseError(0, "blocks state dict", render(v));
    const Value* on = v.find("on");
    if (!on) throw ParseError(0, "'on' entry in blocks state", render(v));
    BlocksState bs = BlocksState::from_on(on_pairs_from_value(*on), b->blocks);
    if (const Value* t = v.find("on-table")) bs.on_table = blocks_from_value(*t);
    if (const Value* c = v.find("clear")) bs.clear = blocks_from_value(*c);
    s = std::move(bs);
  } else if (std::get<GridSpec>(env).kind() == DomainKind::full_sokoban) {
    if (!v.is_sequence() || v.items().size() != 2) throw ParseError(0, "((agent_x, agent_y), (box_x, box_y))", render(v));
    s = SokobanState{coord_from_value(v.items()[0]), coord_from_value(v.items()[1])};
  } else {
    s = GridState{coord_from_value(v)};
  }
  validate_state(s, env);
  return s;
}

Value goal_to_value(const Goal& g, const Environment& env) {
  if (const auto* gg = std::get_if<GridGoal>(&g)) return coord_to_value(gg->cell);
  if (const auto* sg = std::get_if<SokobanGoal>(&g)) return coord_to_value(sg->box_target);
  const auto& bg = std::get<BlocksGoal>(g);
  const auto* spec = std::get_if<BlocksSpec>(&env);
  if (!spec) throw DomainMismatch("blocks goal used with a grid environment");
  return blocks_dict(BlocksState::from_on(bg.on, spec->blocks));
}

Goal goal_from_value(const Value& v, const Environment& env) {
  Goal g;
  if (std::holds_alternative<BlocksSpec>(env)) {
    if (!v.is(Value::Kind::dict)) throw ParseError(0, "blocks goal dict", render(v));
    const Value* on = v.find("on");
    if (!on) throw ParseError(0, "'on' entry in blocks goal", render(v));
    g = BlocksGoal{on_pairs_from_value(*on)};
  } else if (std::get<GridSpec>(env).kind() == DomainKind::full_sokoban) {
    g = SokobanGoal{coord_from_value(v)};
  } else {
    g = GridGoal{coord_from_value(v)};
  }
  validate_goal(g, env);
  return g;
}

Value action_to_value(const Action& a) { return Value::string(to_string(a)); }

Action action_from_value(const Value& v) {
  if (!v.is(Value::Kind::string)) throw ParseError(0, "quoted action name", render(v));
  auto a = parse_action(v.as_string());
  if (!a) throw ParseError(0, "known action", v.as_string());
  return *a;
}

Value actions_to_list(const std::vector<Action>& actions) {
  std::vector<Value> items;
  items.reserve(actions.size());
  for (const Action& a : actions) items.push_back(action_to_value(a));
  return Value::list(std::move(items));
}

Value actions_to_set(const std::vector<Action>& actions) {
  std::vector<Action> sorted = actions;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Value> items;
  for (const Action& a : sorted) items.push_back(action_to_value(a));
  return Value::set(std::move(items));
}

std::vector<Action> action_set_from_value(const Value& v) {
  if (!v.is_sequence()) throw ParseError(0, "collection of actions", render(v));
  std::vector<Action> out;
  for (const Value& item : v.items()) out.push_back(action_from_value(item));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace licl
