#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "licl/baselines.hpp"
#include "licl/domain.hpp"
#include "licl/llm_gateway.hpp"

namespace licl {

enum class Method { licl, zero_shot, rag, sc, sr, react, react_oracle, tot };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct RunConfig {
  DomainKind domain = DomainKind::maze;
  GenerateParams gen;
  std::uint64_t seed = 0;
  std::size_t n_test = 100;
  std::size_t train_pool = 250;
  Method method = Method::licl;
  std::vector<std::size_t> checkpoints{0, 30, 60, 90, 120, 150, 180, 210, 240};
  bool grid_scaffold = true;
  std::size_t batch_flush = 10;
  std::size_t rag_budget = 10000;
  RetrievalMode rag_mode = RetrievalMode::generous;
  std::size_t workers = 1;
  std::string llm = "mock:oracle_perfect";  // mock:<policy>, openai, replay:<log>
  std::map<std::string, std::string> model_options;

  std::string to_json() const;
  static RunConfig from_json(std::string_view text);
  // Throws Error naming the first broken field.
  void validate() const;
};

// Seeds are base * 100000 + index, with training seeds offset by 50000.
std::uint64_t test_seed(std::uint64_t base, std::size_t index);
std::uint64_t train_seed(std::uint64_t base, std::size_t index);

// "maze_10", "blocksworld_5".
std::string corpus_name(DomainKind kind, const GenerateParams& gen);

struct Corpus {
  std::string name;
  DomainKind kind = DomainKind::maze;
  std::vector<ProblemInstance> test;
  std::vector<ProblemInstance> train;
  std::string hash;
};

// root/problems/<corpus>/{test,train}/<id>.pddl + <id>.json and manifest.json.
Corpus cmd_gen(const RunConfig& cfg, const std::filesystem::path& root);
Corpus load_corpus(const std::filesystem::path& root, std::string_view name);

std::shared_ptr<ChatClient> make_client(std::string_view spec, const std::vector<ProblemInstance>& problems,
                                        const std::map<std::string, std::string>& model_options = {});

// root/runs/<corpus>/<method>/<model>/<seed>/
std::filesystem::path run_dir(const std::filesystem::path& root, const RunConfig& cfg, std::string_view model);

// Each returns the run directory. Existing directories are refused unless
// `force` is set, in which case they are replaced.
std::filesystem::path cmd_train(const RunConfig& cfg, const std::filesystem::path& root, ChatClient& llm, bool force);
// Evaluates every snapshot of a training run on cfg's test split. Results go
// to <train_dir>/eval/<corpus>/.
std::filesystem::path cmd_eval(const RunConfig& cfg, const std::filesystem::path& root, ChatClient& llm,
                               const std::filesystem::path& train_dir, bool force);
std::filesystem::path cmd_baseline(const RunConfig& cfg, const std::filesystem::path& root, ChatClient& llm,
                                   bool force);

// Recomputes every summary from its records (throwing ReportError on a
// mismatch or missing field) and returns the comparison CSV.
std::string cmd_report(const std::vector<std::filesystem::path>& dirs);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace licl
