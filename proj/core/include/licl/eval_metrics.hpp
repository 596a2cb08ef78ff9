#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "licl/domain.hpp"

namespace licl {

struct EvalRecord {
  std::string problem_id;
  bool parsed = false;
  bool valid = false;
  bool success = false;
  bool optimal = false;
  int plan_len = 0;
  int optimal_len = 0;
  std::optional<std::size_t> first_error_index;  // 1-based
  bool trap_entered = false;                     // Sokoban only

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

// `parsed` is false when no plan could be read from the model output; such
// plans are never valid.
EvalRecord validate_plan(const ProblemInstance& p, const std::vector<Action>& actions, bool parsed = true);

struct MetricSummary {
  std::size_t n = 0;
  double pct_valid = 0;
  double pct_success = 0;
  double pct_optimal = 0;
  double valid_success_gap = 0;
  std::optional<double> adjusted_trap_rate;

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

// Throws Error for an empty list or a record breaking the hierarchy.
MetricSummary summarize(const std::vector<EvalRecord>& records);

struct Checkpoint {
  std::size_t m = 0;
  MetricSummary summary;
  std::size_t prompt_chars = 0;
};

// CSV with header m,pct_valid,pct_success,pct_optimal,prompt_chars.
std::string learning_curve(const std::vector<Checkpoint>& checkpoints);

// Minimal CSV reader: header row plus data rows, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::string_view text);

std::string to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(std::string_view line);
std::string to_jsonl(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> eval_records_from_jsonl(std::string_view text);

std::string to_json(const MetricSummary& s);
MetricSummary metric_summary_from_json(std::string_view text);

// Percentages are printed with two decimals everywhere.
std::string format_pct(double v);

}  // namespace licl
