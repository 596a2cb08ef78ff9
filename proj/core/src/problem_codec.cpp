#include "licl/problem_codec.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/core.h>
#include <json.hpp>

#include "licl/errors.hpp"

namespace licl {

namespace {

struct Node {
  std::size_t offset = 0;
  bool is_atom = false;
  std::string atom;
  std::vector<Node> children;
};

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  Node read_top() {
    skip_ws();
    if (peek() != '(') throw ParseError(pos_, "'('");
    Node n = read();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "end of problem text");
    return n;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Node read() {
    skip_ws();
    Node n;
    n.offset = pos_;
    if (pos_ >= text_.size()) throw ParseError(pos_, "')'", "unbalanced parentheses");
    if (text_[pos_] == ')') throw ParseError(pos_, "atom or '('", "unexpected ')'");
    if (text_[pos_] != '(') {
      n.is_atom = true;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
             text_[pos_] != ')') {
        n.atom += text_[pos_++];
      }
      return n;
    }
    if (++depth_ > 32) throw ParseError(pos_, "shallower nesting");
    ++pos_;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) throw ParseError(pos_, "')'", "unbalanced parentheses");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      n.children.push_back(read());
    }
    --depth_;
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

bool is_head(const Node& n, std::string_view head) {
  return !n.is_atom && !n.children.empty() && n.children[0].is_atom && n.children[0].atom == head;
}

const std::string& atom_arg(const Node& n, std::size_t i, std::string_view expected) {
  if (i >= n.children.size() || !n.children[i].is_atom) {
    throw ParseError(i < n.children.size() ? n.children[i].offset : n.offset, std::string(expected));
  }
  return n.children[i].atom;
}

Coord parse_cell(const Node& n) {
  const std::string& s = n.atom;
  const auto fail = [&] { return ParseError(n.offset, "cell name cX-Y", fmt::format("got '{}'", s)); };
  if (s.size() < 4 || s[0] != 'c') throw fail();
  const auto dash = s.find('-', 1);
  if (dash == std::string::npos) throw fail();
  const auto digits = [](std::string_view d) {
    return !d.empty() && d.size() <= 6 && std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  const std::string_view xs = std::string_view(s).substr(1, dash - 1);
  const std::string_view ys = std::string_view(s).substr(dash + 1);
  if (!digits(xs) || !digits(ys)) throw fail();
  return {std::stoi(std::string(xs)), std::stoi(std::string(ys))};
}

Block parse_block(const Node& n) {
  if (!n.is_atom || n.atom.size() != 1 || !std::isalpha(static_cast<unsigned char>(n.atom[0]))) {
    throw ParseError(n.offset, "single-letter block name");
  }
  return n.atom[0];
}

struct Facts {
  std::vector<std::pair<Coord, std::size_t>> at;
  std::vector<std::pair<Coord, std::size_t>> box;
  std::set<OnPair> on;
  std::set<Block> on_table;
  std::set<Block> clear;
};

Facts read_facts(const Node& section) {
  Facts f;
  for (std::size_t i = 1; i < section.children.size(); ++i) {
    const Node& fact = section.children[i];
    if (fact.is_atom || fact.children.empty() || !fact.children[0].is_atom) {
      throw ParseError(fact.offset, "fact such as (at c1-1)");
    }
    const std::string& pred = fact.children[0].atom;
    const auto arity = [&](std::size_t n) {
      if (fact.children.size() != n + 1) {
        throw ParseError(fact.offset, fmt::format("{} argument(s) for '{}'", n, pred));
      }
      for (std::size_t k = 1; k <= n; ++k) {
        if (!fact.children[k].is_atom) throw ParseError(fact.children[k].offset, "atom argument");
      }
    };
    if (pred == "at" || pred == "box") {
      arity(1);
      (pred == "at" ? f.at : f.box).emplace_back(parse_cell(fact.children[1]), fact.offset);
    } else if (pred == "on") {
      arity(2);
      f.on.insert({parse_block(fact.children[1]), parse_block(fact.children[2])});
    } else if (pred == "on-table") {
      arity(1);
      f.on_table.insert(parse_block(fact.children[1]));
    } else if (pred == "clear") {
      arity(1);
      f.clear.insert(parse_block(fact.children[1]));
    } else {
      throw ParseError(fact.children[0].offset, "known predicate (at, box, on, on-table, clear)",
                       fmt::format("got '{}'", pred));
    }
  }
  return f;
}

Coord single(const std::vector<std::pair<Coord, std::size_t>>& facts, const Node& section, std::string_view what) {
  if (facts.size() != 1) {
    throw ParseError(facts.empty() ? section.offset : facts[1].second, fmt::format("exactly one ({} cX-Y) fact", what));
  }
  return facts[0].first;
}

struct Sections {
  std::string id;
  std::string domain;
  const Node* init = nullptr;
  const Node* goal = nullptr;
};

Sections read_sections(const Node& top) {
  if (!is_head(top, "define")) throw ParseError(top.offset, "(define ...)");
  Sections s;
  bool have_problem = false;
  bool have_domain = false;
  for (std::size_t i = 1; i < top.children.size(); ++i) {
    const Node& n = top.children[i];
    if (is_head(n, "problem")) {
      if (have_problem) throw ParseError(n.offset, "a single (problem ...) header");
      s.id = atom_arg(n, 1, "problem id");
      have_problem = true;
    } else if (is_head(n, ":domain")) {
      if (have_domain) throw ParseError(n.offset, "a single :domain section");
      s.domain = atom_arg(n, 1, "domain name");
      have_domain = true;
    } else if (is_head(n, ":init")) {
      if (s.init) throw ParseError(n.offset, "a single :init section");
      s.init = &n;
    } else if (is_head(n, ":goal")) {
      if (s.goal) throw ParseError(n.offset, "a single :goal section");
      s.goal = &n;
    } else {
      throw ParseError(n.offset, "(problem ...), (:domain ...), (:init ...) or (:goal ...)");
    }
  }
  const std::size_t end = top.offset;
  if (!have_problem) throw ParseError(end, "(problem <id>) header");
  if (!have_domain) throw ParseError(end, "(:domain <name>) section");
  if (!s.init) throw ParseError(end, "(:init ...) section");
  if (!s.goal) throw ParseError(end, "(:goal ...) section");
  return s;
}

std::string cell(Coord c) { return fmt::format("c{}-{}", c.x, c.y); }

}  // namespace

std::string serialize_problem(const ProblemInstance& p) {
  std::vector<std::string> init;
  std::vector<std::string> goal;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GridState>) {
          init.push_back(fmt::format("(at {})", cell(s.agent)));
        } else if constexpr (std::is_same_v<S, SokobanState>) {
          init.push_back(fmt::format("(at {})", cell(s.agent)));
          init.push_back(fmt::format("(box {})", cell(s.box)));
        } else {
          for (const auto& [u, l] : s.on) init.push_back(fmt::format("(on {} {})", u, l));
          for (Block b : s.on_table) init.push_back(fmt::format("(on-table {})", b));
          for (Block b : s.clear) init.push_back(fmt::format("(clear {})", b));
        }
      },
      p.initial);
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, GridGoal>) {
          goal.push_back(fmt::format("(at {})", cell(g.cell)));
        } else if constexpr (std::is_same_v<G, SokobanGoal>) {
          goal.push_back(fmt::format("(box {})", cell(g.box_target)));
        } else {
          for (const auto& [u, l] : g.on) goal.push_back(fmt::format("(on {} {})", u, l));
        }
      },
      p.goal);
  const auto join = [](const std::vector<std::string>& facts) {
    std::string out;
    for (const auto& f : facts) out += " " + f;
    return out;
  };
  return fmt::format("(define (problem {})\n  (:domain {})\n  (:init{})\n  (:goal{})\n)\n", p.id, p.domain_name,
                     join(init), join(goal));
}

ProblemInstance parse_problem(std::string_view text, const Environment& env) {
  const Node top = SexprReader(text).read_top();
  const Sections sec = read_sections(top);
  const Facts init = read_facts(*sec.init);
  const Facts goal = read_facts(*sec.goal);

  ProblemInstance p;
  p.id = sec.id;
  p.domain_name = sec.domain;
  p.env = env;
  if (const auto* b = std::get_if<BlocksSpec>(&env)) {
    if (!init.at.empty() || !init.box.empty()) throw ParseError(sec.init->offset, "BlocksWorld facts only");
    if (!goal.at.empty() || !goal.box.empty()) throw ParseError(sec.goal->offset, "BlocksWorld facts only");
    BlocksState s;
    s.on = init.on;
    s.on_table = init.on_table;
    s.clear = init.clear;
    p.initial = std::move(s);
    p.goal = BlocksGoal{goal.on};
    (void)b;
  } else if (std::get<GridSpec>(env).kind() == DomainKind::full_sokoban) {
    p.initial = SokobanState{single(init.at, *sec.init, "at"), single(init.box, *sec.init, "box")};
    p.goal = SokobanGoal{single(goal.box, *sec.goal, "box")};
  } else {
    if (!init.box.empty()) throw ParseError(init.box[0].second, "no box facts outside full Sokoban");
    p.initial = GridState{single(init.at, *sec.init, "at")};
    p.goal = GridGoal{single(goal.at, *sec.goal, "at")};
  }
  validate_state(p.initial, p.env);
  validate_goal(p.goal, p.env);
  return p;
}

ProblemHeader parse_problem_header(std::string_view text) {
  const Node top = SexprReader(text).read_top();
  const Sections sec = read_sections(top);
  return {sec.id, sec.domain};
}

std::string normalize_problem_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty() && out.back() != '(' && c != ')') out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string environment_to_json(const Environment& env) {
  nlohmann::json j;
  if (const auto* b = std::get_if<BlocksSpec>(&env)) {
    j["kind"] = std::string(to_string(DomainKind::blocksworld));
    std::vector<std::string> names;
    for (Block c : b->blocks) names.emplace_back(1, c);
    j["blocks"] = names;
  } else {
    const auto& g = std::get<GridSpec>(env);
    j["kind"] = std::string(to_string(g.kind()));
    j["width"] = g.width();
    j["height"] = g.height();
    j["seed"] = g.seed();
    nlohmann::json walls = nlohmann::json::array();
    for (Coord c : g.walls()) walls.push_back({c.x, c.y});
    j["walls"] = walls;
  }
  return j.dump();
}

Environment environment_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const DomainKind kind = domain_kind_from_string(j.at("kind").get<std::string>());
    if (kind == DomainKind::blocksworld) {
      BlocksSpec spec;
      for (const auto& name : j.at("blocks")) {
        const auto s = name.get<std::string>();
        if (s.size() != 1) throw Error("block names must be single letters");
        spec.blocks.push_back(s[0]);
      }
      std::sort(spec.blocks.begin(), spec.blocks.end());
      return spec;
    }
    GridSpec g(kind, j.at("width").get<int>(), j.at("height").get<int>(), j.value("seed", std::uint64_t{0}));
    for (const auto& w : j.at("walls")) g.set_wall({w.at(0).get<int>(), w.at(1).get<int>()});
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, "environment JSON", e.what());
  }
}

}  // namespace licl
