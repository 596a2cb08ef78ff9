#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "licl/domain.hpp"

namespace licl {

struct Correction {
  std::string function;
  std::string input_render;   // "state=(3, 4), goal=(7, 8)"
  std::string output_render;  // "{'move-north', 'move-south'}"
  std::string origin;         // "<problem id>#<call index>"

  // Deduplication key: (function, input_render).
  std::string key() const { return function + "(" + input_render + ")"; }
};

// ">>> f(args)" newline "output", with "... " continuation lines when the
// call line exceeds 80 characters. No trailing newline.
std::string format_correction(const Correction& c);

struct SubroutineDoc {
  std::string name;
  std::string signature;    // full "def ...:" line(s)
  std::string description;  // first docstring line
  std::vector<Correction> examples;
};

struct PartialProgram {
  DomainKind kind = DomainKind::maze;
  std::string preamble;
  std::vector<SubroutineDoc> subroutines;
  std::string task_name;
  std::string task_description;  // docstring body before the example traces
  std::vector<std::string> example_traces;  // ">>> task(...)" line plus trace, unindented

  std::string render() const;
  std::size_t correction_count() const;
  const SubroutineDoc* find(std::string_view name) const;
};

// Documentation skeleton for a domain with oracle traces of `examples`
// embedded in the task docstring.
PartialProgram base_program(DomainKind kind, const std::vector<ProblemInstance>& examples);

// The fixed example problems for a domain's base program.
std::vector<ProblemInstance> default_example_problems(DomainKind kind, const GenerateParams& params = {});

// Appends corrections to their subroutine docs in arrival order, skipping
// keys already present. Throws RoutingError for an unknown subroutine.
PartialProgram insert_corrections(const PartialProgram& base, const std::vector<Correction>& corrections);

struct PromptOptions {
  std::optional<std::string> ascii_grid;
  std::string grid_size;  // "10x10"
  std::size_t num_walls = 0;
  bool ubw_preamble = false;
  bool sokoban_actions = false;
};

std::string build_prompt(const PartialProgram& pp, std::string_view task_name, std::string_view input_str,
                         const PromptOptions& options);

PromptOptions prompt_options_for(const ProblemInstance& p, bool ascii_grid);

// The full query prompt for one problem.
std::string licl_prompt(const PartialProgram& pp, const ProblemInstance& p, bool ascii_grid);

// Replaces {name} placeholders. Throws AssemblyError naming any placeholder
// without a value.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

}  // namespace licl
