#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "licl/errors.hpp"
#include "licl/eval_metrics.hpp"
#include "licl/prompt_forge.hpp"
#include "licl/runner.hpp"

namespace fs = std::filesystem;
using namespace licl;

namespace {

struct Flags {
  std::string config;
  std::string root = "data";
  std::string domain;
  int size = 0;
  int n_blocks = 0;
  double wall_density = 0;
  std::uint64_t seed = 0;
  std::size_t n_test = 0;
  std::size_t train_pool = 0;
  std::string method;
  std::vector<std::size_t> checkpoints;
  bool no_grid = false;
  std::size_t batch_flush = 0;
  std::size_t rag_budget = 0;
  std::string rag_mode;
  std::size_t workers = 0;
  std::string llm;
  bool force = false;
};

void add_common(CLI::App* cmd, Flags& f, std::vector<CLI::Option*>& opts) {
  opts.push_back(cmd->add_option("--config", f.config, "JSON run configuration; flags override its fields"));
  opts.push_back(cmd->add_option("--root", f.root, "Data directory holding problems/ and runs/")->capture_default_str());
  opts.push_back(cmd->add_option("--domain", f.domain, "two_room, maze, sokoban_grid, full_sokoban or blocksworld"));
  opts.push_back(cmd->add_option("--size", f.size, "Grid width and height"));
  opts.push_back(cmd->add_option("--n-blocks", f.n_blocks, "Number of blocks"));
  opts.push_back(cmd->add_option("--wall-density", f.wall_density, "Interior wall density for Sokoban layouts"));
  opts.push_back(cmd->add_option("--seed", f.seed, "Base seed"));
  opts.push_back(cmd->add_option("--n-test", f.n_test, "Test problems"));
  opts.push_back(cmd->add_option("--train-pool", f.train_pool, "Training problems"));
}

RunConfig resolve(const Flags& f, CLI::App* cmd) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::from_json(read_file(f.config));
  const auto given = [&](const char* name) { return cmd->get_option_no_throw(name) && cmd->count(name) > 0; };
  if (given("--domain")) c.domain = domain_kind_from_string(f.domain);
  if (given("--size")) c.gen.size = f.size;
  if (given("--n-blocks")) c.gen.n_blocks = f.n_blocks;
  if (given("--wall-density")) c.gen.wall_density = f.wall_density;
  if (given("--seed")) c.seed = f.seed;
  if (given("--n-test")) c.n_test = f.n_test;
  if (given("--train-pool")) c.train_pool = f.train_pool;
  if (given("--method")) c.method = method_from_string(f.method);
  if (given("--checkpoints")) c.checkpoints = f.checkpoints;
  if (given("--no-grid")) c.grid_scaffold = !f.no_grid;
  if (given("--batch-flush")) c.batch_flush = f.batch_flush;
  if (given("--rag-budget")) c.rag_budget = f.rag_budget;
  if (given("--rag-mode")) c.rag_mode = retrieval_mode_from_string(f.rag_mode);
  if (given("--workers")) c.workers = f.workers;
  if (given("--llm")) c.llm = f.llm;
  c.validate();
  return c;
}

std::shared_ptr<ChatClient> client_for(const RunConfig& c, const Corpus& corpus) {
  std::vector<ProblemInstance> known = corpus.test;
  known.insert(known.end(), corpus.train.begin(), corpus.train.end());
  const auto examples = default_example_problems(c.domain, c.gen);
  known.insert(known.end(), examples.begin(), examples.end());
  return make_client(c.llm, known, c.model_options);
}

void print_summary(const fs::path& summary_path) {
  const MetricSummary s = metric_summary_from_json(read_file(summary_path));
  fmt::print("{}: valid {}%, success {}%, optimal {}%\n", summary_path.filename().string(), format_pct(s.pct_valid),
             format_pct(s.pct_success), format_pct(s.pct_optimal));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized in-context learning harness for LLM planners"};
  app.require_subcommand(1);
  Flags f;
  std::vector<CLI::Option*> opts;

  auto* gen = app.add_subcommand("gen", "Generate a test/train problem corpus");
  add_common(gen, f, opts);

  auto* train = app.add_subcommand("train", "Run correction training and snapshot prompts at checkpoints");
  add_common(train, f, opts);
  train->add_option("--llm", f.llm, "mock:oracle_perfect, mock:wall_blind, openai or replay:<transcripts.jsonl>");
  train->add_option("--checkpoints", f.checkpoints, "Training sizes to snapshot, ascending")->delimiter(',');
  train->add_option("--batch-flush", f.batch_flush, "Problems per prompt update");
  train->add_flag("--no-grid", f.no_grid, "Omit the ASCII grid from prompts");
  train->add_flag("--force", f.force, "Replace an existing run directory");

  std::string train_dir;
  auto* eval = app.add_subcommand("eval", "Evaluate the snapshots of a training run on a test corpus");
  add_common(eval, f, opts);
  eval->add_option("--llm", f.llm, "mock:oracle_perfect, mock:wall_blind, openai or replay:<transcripts.jsonl>");
  eval->add_option("--train-dir", train_dir, "Training run directory")->required();
  eval->add_option("--workers", f.workers, "Concurrent problems");
  eval->add_flag("--no-grid", f.no_grid, "Omit the ASCII grid from prompts");
  eval->add_flag("--force", f.force, "Replace existing evaluation results");

  auto* baseline = app.add_subcommand("baseline", "Run a comparison method on a test corpus");
  add_common(baseline, f, opts);
  baseline->add_option("--method", f.method, "zero_shot, rag, sc, sr, react, react_oracle or tot")->required();
  baseline->add_option("--llm", f.llm, "mock:oracle_perfect, mock:wall_blind, openai or replay:<transcripts.jsonl>");
  baseline->add_option("--rag-budget", f.rag_budget, "Retrieval budget in characters");
  baseline->add_option("--rag-mode", f.rag_mode, "strict, generous or fixed");
  baseline->add_option("--workers", f.workers, "Concurrent problems");
  baseline->add_flag("--force", f.force, "Replace an existing run directory");

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Recompute summaries and write a comparison CSV");
  report->add_option("dirs", report_dirs, "Run directories")->required();
  report->add_option("--out", report_out, "Write the CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const RunConfig c = resolve(f, gen);
      const Corpus corpus = cmd_gen(c, f.root);
      fmt::print("{}: {} test + {} train problems, hash {}\n", corpus.name, corpus.test.size(), corpus.train.size(),
                 corpus.hash);
    } else if (train->parsed()) {
      const RunConfig c = resolve(f, train);
      const Corpus corpus = load_corpus(f.root, corpus_name(c.domain, c.gen));
      auto llm = client_for(c, corpus);
      const fs::path dir = cmd_train(c, f.root, *llm, f.force);
      fmt::print("training run written to {}\n", dir.string());
    } else if (eval->parsed()) {
      const RunConfig c = resolve(f, eval);
      const Corpus corpus = load_corpus(f.root, corpus_name(c.domain, c.gen));
      auto llm = client_for(c, corpus);
      const fs::path dir = cmd_eval(c, f.root, *llm, train_dir, f.force);
      std::vector<std::pair<std::size_t, fs::path>> summaries;
      for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().stem().string();
        if (name.rfind("summary_m", 0) == 0) summaries.emplace_back(std::stoul(name.substr(9)), e.path());
      }
      std::sort(summaries.begin(), summaries.end());
      for (const auto& [m, sp] : summaries) print_summary(sp);
      fmt::print("evaluation written to {}\n", dir.string());
    } else if (baseline->parsed()) {
      const RunConfig c = resolve(f, baseline);
      const Corpus corpus = load_corpus(f.root, corpus_name(c.domain, c.gen));
      auto llm = client_for(c, corpus);
      const fs::path dir = cmd_baseline(c, f.root, *llm, f.force);
      print_summary(dir / "summary.json");
      fmt::print("run written to {}\n", dir.string());
    } else if (report->parsed()) {
      std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
      const std::string csv = cmd_report(dirs);
      if (report_out.empty()) {
        std::cout << csv;
      } else {
        write_file(report_out, csv);
      }
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
