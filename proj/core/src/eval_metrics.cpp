#include "licl/eval_metrics.hpp"

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "licl/errors.hpp"
#include "licl/oracle.hpp"

namespace licl {

using nlohmann::json;

EvalRecord validate_plan(const ProblemInstance& p, const std::vector<Action>& actions, bool parsed) {
  EvalRecord r;
  r.problem_id = p.id;
  r.parsed = parsed;
  r.plan_len = static_cast<int>(actions.size());
  r.optimal_len = optimal_length(p);
  if (!parsed) return r;

  const auto* sokoban_goal = std::get_if<SokobanGoal>(&p.goal);
  const auto trapped = [&](const PlanningState& s) {
    return sokoban_goal && is_trap(std::get<SokobanState>(s), std::get<GridSpec>(p.env), *sokoban_goal);
  };
  PlanningState s = p.initial;
  r.trap_entered = trapped(s);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    try {
      s = apply_action(s, actions[i], p.env);
    } catch (const PreconditionViolation&) {
      r.first_error_index = i + 1;
      return r;
    }
    if (!r.trap_entered) r.trap_entered = trapped(s);
  }
  r.valid = true;
  r.success = at_goal(s, p.goal);
  r.optimal = r.success && r.plan_len == r.optimal_len;
  return r;
}

MetricSummary summarize(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw Error("cannot summarize an empty record list");
  std::size_t valid = 0, success = 0, optimal = 0, trapped = 0;
  for (const auto& r : records) {
    if ((r.optimal && !r.success) || (r.success && !r.valid)) {
      throw Error(fmt::format("record {} breaks optimal => success => valid", r.problem_id));
    }
    valid += r.valid;
    success += r.success;
    optimal += r.optimal;
    trapped += r.valid && r.trap_entered;
  }
  const double n = static_cast<double>(records.size());
  MetricSummary s;
  s.n = records.size();
  s.pct_valid = 100.0 * static_cast<double>(valid) / n;
  s.pct_success = 100.0 * static_cast<double>(success) / n;
  s.pct_optimal = 100.0 * static_cast<double>(optimal) / n;
  s.valid_success_gap = s.pct_valid - s.pct_success;
  if (valid > 0) s.adjusted_trap_rate = static_cast<double>(trapped) / static_cast<double>(valid);
  return s;
}

std::string format_pct(double v) { return fmt::format("{:.2f}", v); }

std::string learning_curve(const std::vector<Checkpoint>& checkpoints) {
  std::string out = "m,pct_valid,pct_success,pct_optimal,prompt_chars\n";
  for (const auto& c : checkpoints) {
    out += fmt::format("{},{},{},{},{}\n", c.m, format_pct(c.summary.pct_valid), format_pct(c.summary.pct_success),
                       format_pct(c.summary.pct_optimal), c.prompt_chars);
  }
  return out;
}

CsvTable read_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

std::string to_json(const EvalRecord& r) {
  json j{{"problem_id", r.problem_id},
         {"parsed", r.parsed},
         {"valid", r.valid},
         {"success", r.success},
         {"optimal", r.optimal},
         {"plan_len", r.plan_len},
         {"optimal_len", r.optimal_len},
         {"first_error_index", r.first_error_index ? json(*r.first_error_index) : json(nullptr)},
         {"trap_entered", r.trap_entered}};
  return j.dump();
}

EvalRecord eval_record_from_json(std::string_view line) {
  const json j = json::parse(line);
  EvalRecord r;
  r.problem_id = j.at("problem_id").get<std::string>();
  r.parsed = j.at("parsed").get<bool>();
  r.valid = j.at("valid").get<bool>();
  r.success = j.at("success").get<bool>();
  r.optimal = j.at("optimal").get<bool>();
  r.plan_len = j.at("plan_len").get<int>();
  r.optimal_len = j.at("optimal_len").get<int>();
  if (!j.at("first_error_index").is_null()) r.first_error_index = j["first_error_index"].get<std::size_t>();
  r.trap_entered = j.at("trap_entered").get<bool>();
  return r;
}

std::string to_jsonl(const std::vector<EvalRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r) + "\n";
  return out;
}

std::vector<EvalRecord> eval_records_from_jsonl(std::string_view text) {
  std::vector<EvalRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty()) out.push_back(eval_record_from_json(line));
  }
  return out;
}

std::string to_json(const MetricSummary& s) {
  json j{{"n", s.n},
         {"pct_valid", s.pct_valid},
         {"pct_success", s.pct_success},
         {"pct_optimal", s.pct_optimal},
         {"valid_success_gap", s.valid_success_gap},
         {"adjusted_trap_rate", s.adjusted_trap_rate ? json(*s.adjusted_trap_rate) : json(nullptr)}};
  return j.dump(2);
}

MetricSummary metric_summary_from_json(std::string_view text) {
  const json j = json::parse(text);
  MetricSummary s;
  s.n = j.at("n").get<std::size_t>();
  s.pct_valid = j.at("pct_valid").get<double>();
  s.pct_success = j.at("pct_success").get<double>();
  s.pct_optimal = j.at("pct_optimal").get<double>();
  s.valid_success_gap = j.at("valid_success_gap").get<double>();
  if (!j.at("adjusted_trap_rate").is_null()) s.adjusted_trap_rate = j["adjusted_trap_rate"].get<double>();
  return s;
}

}  // namespace licl
