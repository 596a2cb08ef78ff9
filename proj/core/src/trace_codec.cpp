#include "licl/trace_codec.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <fmt/core.h>

#include "licl/errors.hpp"

namespace licl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kAliases{{
    {"north", "move-north"},
    {"south", "move-south"},
    {"east", "move-east"},
    {"west", "move-west"},
    {"up", "move-north"},
    {"down", "move-south"},
    {"right", "move-east"},
    {"left", "move-west"},
}};

bool is_block_action_name(std::string_view w) {
  return w == "move-b-to-b" || w == "move-b-to-t" || w == "move-t-to-b";
}

struct ScannedToken {
  std::string text;  // lower-cased, underscores folded to hyphens (block args keep case)
  bool block = false;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits free text into word tokens, keeping block actions with their
// parenthesized arguments as single tokens.
std::vector<ScannedToken> scan_words(std::string_view text) {
  std::vector<ScannedToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' || text[i] == '-')) {
      ++i;
    }
    std::string word = lower(text.substr(start, i - start));
    std::replace(word.begin(), word.end(), '_', '-');
    while (!word.empty() && word.back() == '-') word.pop_back();
    ScannedToken tok{word, false, start, i};
    if (is_block_action_name(word)) {
      std::size_t j = i;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
      if (j < text.size() && text[j] == '(') {
        const auto close = text.find(')', j);
        if (close != std::string_view::npos && close - j < 40) {
          tok.text = word + std::string(text.substr(j, close - j + 1));
          tok.block = true;
          tok.end = close + 1;
          i = close + 1;
        }
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::optional<Action> strict_action(const ScannedToken& tok) {
  if (tok.block) return parse_action(tok.text);
  if (starts_with(tok.text, "move-") || starts_with(tok.text, "push-")) {
    if (auto a = parse_action(tok.text); a && !a->is_block()) return a;
  }
  return std::nullopt;
}

std::vector<Action> actions_in(std::string_view segment, bool allow_aliases) {
  std::vector<Action> out;
  for (const auto& tok : scan_words(segment)) {
    if (auto a = allow_aliases ? normalize_action_token(tok.text) : strict_action(tok)) out.push_back(*a);
  }
  return out;
}

// Text after `marker` up to the end of its line; leading whitespace,
// including newlines, is skipped first.
std::optional<std::string_view> answer_after(std::string_view text, std::string_view marker) {
  const auto at = text.find(marker);
  if (at == std::string_view::npos) return std::nullopt;
  std::size_t b = at + marker.size();
  while (b < text.size() && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  if (b >= text.size()) return std::nullopt;
  std::size_t e = text.find('\n', b);
  if (e == std::string_view::npos) e = text.size();
  return text.substr(b, e - b);
}

std::optional<std::vector<Action>> parse_answer_line(std::string_view rest) {
  rest = trim(rest);
  if (rest.empty()) return std::nullopt;
  if (rest.front() == '[') {
    if (auto v = try_parse_value(rest)) {
      try {
        std::vector<Action> out;
        for (const Value& item : v->items()) out.push_back(action_from_value(item));
        return out;
      } catch (const Error&) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }
  std::vector<Action> out;
  for (const auto& tok : scan_words(rest)) {
    auto a = normalize_action_token(tok.text);
    if (!a) return std::nullopt;
    out.push_back(*a);
  }
  return out;
}

}  // namespace

std::optional<Action> normalize_action_token(std::string_view token) {
  std::string_view t = trim(token);
  const auto junk = [](char c) { return std::string_view("*`'\"[],.;:!").find(c) != std::string_view::npos; };
  while (!t.empty() && junk(t.front())) t.remove_prefix(1);
  while (!t.empty() && junk(t.back())) t.remove_suffix(1);
  if (t.empty()) return std::nullopt;
  if (t.find('(') != std::string_view::npos) return parse_action(t);
  std::string w = lower(t);
  std::replace(w.begin(), w.end(), '_', '-');
  for (const auto& [alias, canonical] : kAliases) {
    if (w == alias) return parse_action(canonical);
  }
  if (auto a = parse_action(w); a && !a->is_block()) return a;
  return std::nullopt;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  t.source = std::string(text);
  std::vector<std::size_t> open;  // indices of calls awaiting a return line
  std::size_t pos = 0;
  std::optional<std::size_t> pending_answer;  // Final answer line with no inline tokens
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view raw = text.substr(pos, eol - pos);
    const std::string_view line = trim(raw);
    const std::size_t line_start = pos;
    pos = eol + 1;

    if (pending_answer && !line.empty()) {
      if (auto plan = parse_answer_line(line)) t.final_answer = std::move(plan);
      pending_answer.reset();
      continue;
    }

    if (starts_with(line, "Calling ") && line.size() > 12 && line.substr(line.size() - 3) == "...") {
      std::string_view body = line.substr(8, line.size() - 11);
      std::size_t n = 0;
      while (n < body.size() && is_ident(body[n])) ++n;
      if (n == 0 || !is_ident_start(body[0]) || n >= body.size() || body[n] != '(' || body.back() != ')') {
        t.diagnostics.push_back(fmt::format("byte {}: malformed Calling line", line_start));
        continue;
      }
      SubroutineCall call;
      call.name = std::string(body.substr(0, n));
      call.raw_args = std::string(body.substr(n + 1, body.size() - n - 2));
      const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data());
      call.line_span = {line_start + indent, line_start + indent + line.size()};
      try {
        call.args = parse_arguments(call.raw_args);
      } catch (const ParseError& e) {
        t.diagnostics.push_back(fmt::format("byte {}: arguments of {} did not parse: {}", line_start, call.name, e.what()));
      }
      open.push_back(t.calls.size());
      t.calls.push_back(std::move(call));
      continue;
    }

    if (starts_with(line, "...")) {
      const std::string_view body = line.substr(3);
      std::size_t n = 0;
      while (n < body.size() && is_ident(body[n])) ++n;
      const std::string_view name = body.substr(0, n);
      if (n == 0 || !starts_with(body.substr(n), " returned")) continue;
      std::string_view value = body.substr(n + 9);
      if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      auto it = std::find_if(open.rbegin(), open.rend(), [&](std::size_t i) { return t.calls[i].name == name; });
      if (it == open.rend()) {
        t.diagnostics.push_back(fmt::format("byte {}: return from {} without a matching call", line_start, name));
        continue;
      }
      SubroutineCall& call = t.calls[*it];
      open.erase(std::next(it).base());
      call.raw_output = std::string(trim(value));
      call.output = try_parse_value(*call.raw_output);
      if (!call.output) {
        t.diagnostics.push_back(fmt::format("byte {}: return value of {} did not parse", line_start, name));
      }
      continue;
    }

    for (std::string_view marker : {"Final answer:", "Final Answer:"}) {
      if (starts_with(line, marker)) {
        const std::string_view rest = trim(line.substr(marker.size()));
        if (rest.empty()) {
          pending_answer = line_start;
        } else if (auto plan = parse_answer_line(rest)) {
          t.final_answer = std::move(plan);
        } else {
          t.diagnostics.push_back(fmt::format("byte {}: final answer did not parse", line_start));
        }
        break;
      }
    }
  }
  for (std::size_t i : open) {
    t.diagnostics.push_back(fmt::format("call {} ({}) has no return line", i + 1, t.calls[i].name));
  }
  return t;
}

std::vector<Action> parse_action_sequence(std::string_view text) {
  static constexpr std::array<std::string_view, 6> kPatterns{
      "**Final Action Sequence:**", "Final Action Sequence:", "**Action Sequence:**",
      "Action Sequence:",           "Optimal path:",          "Plan:",
  };
  for (std::string_view marker : kPatterns) {
    if (auto segment = answer_after(text, marker)) {
      auto actions = actions_in(*segment, true);
      if (!actions.empty()) return actions;
    }
  }

  // A line consisting only of comma-separated actions or direction words;
  // the last one wins.
  std::vector<Action> best;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.find(',') == std::string_view::npos) continue;
    std::vector<Action> actions;
    bool ok = true;
    const auto tokens = scan_words(line);
    for (const auto& tok : tokens) {
      auto a = normalize_action_token(tok.text);
      if (!a) {
        ok = false;
        break;
      }
      actions.push_back(*a);
    }
    if (ok && actions.size() >= 2) best = std::move(actions);
  }
  if (!best.empty()) return best;

  return actions_in(text, false);
}

std::string render_call_line(std::string_view name, const std::vector<Value>& args) {
  std::string out = fmt::format("Calling {}(", name);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += render(args[i]);
  }
  return out + ")...";
}

std::string render_return_line(std::string_view name, const Value& output) {
  return fmt::format("...{} returned {}", name, render(output));
}

std::string render_call(std::string_view name, const std::vector<Value>& args, const Value& output) {
  return render_call_line(name, args) + "\n" + render_return_line(name, output);
}

std::string render_final_answer(const std::vector<Action>& plan) {
  std::string out = "Final answer:";
  for (const Action& a : plan) out += " " + to_string(a);
  return out + "\n" + render(actions_to_list(plan));
}

}  // namespace licl
