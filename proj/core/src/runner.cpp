#include "licl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "licl/errors.hpp"
#include "licl/eval_metrics.hpp"
#include "licl/licl_engine.hpp"
#include "licl/oracle.hpp"
#include "licl/problem_codec.hpp"
#include "licl/prompt_forge.hpp"
#include "licl/trace_codec.hpp"
#include "licl/util.hpp"

namespace licl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kMethodNames[] = {"licl", "zero_shot", "rag", "sc", "sr", "react", "react_oracle", "tot"};

// Forwards calls and totals prompt sizes.
class MeterClient final : public ChatClient {
 public:
  explicit MeterClient(ChatClient& inner) : inner_(inner) {}
  std::string model() const override { return inner_.model(); }
  double mean_prompt_chars() const {
    const auto n = count_.load();
    return n == 0 ? 0.0 : static_cast<double>(chars_.load()) / static_cast<double>(n);
  }

 protected:
  std::string do_complete(const CompletionRequest& req) override {
    chars_ += req.prompt.size();
    ++count_;
    return inner_.complete(req);
  }

 private:
  ChatClient& inner_;
  std::atomic<std::size_t> chars_{0};
  std::atomic<std::size_t> count_{0};
};

std::shared_ptr<ChatClient> borrow(ChatClient& c) {
  return std::shared_ptr<ChatClient>(&c, [](ChatClient*) {});
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_';
  return out.empty() ? "model" : out;
}

void prepare_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!force) throw Error(fmt::format("{} already exists; pass --force to overwrite", dir.string()));
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

json correction_json(const Correction& c) {
  return json{{"function", c.function}, {"input", c.input_render}, {"output", c.output_render}, {"origin", c.origin}};
}

std::string corrections_jsonl(const std::vector<Correction>& cs) {
  std::string out;
  for (const auto& c : cs) out += correction_json(c).dump() + "\n";
  return out;
}

std::vector<Correction> corrections_from_jsonl(std::string_view text) {
  std::vector<Correction> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    out.push_back({j.at("function").get<std::string>(), j.at("input").get<std::string>(),
                   j.at("output").get<std::string>(), j.value("origin", std::string{})});
  }
  return out;
}

std::string join_actions(const std::vector<Action>& plan) {
  std::string out;
  for (const auto& a : plan) out += (out.empty() ? "" : " ") + to_string(a);
  return out;
}

void write_meta(const fs::path& path, const std::string& run, const RunConfig& cfg, std::string_view model,
                std::size_t m, double context_chars) {
  json meta{{"run", run},
            {"method", std::string(to_string(cfg.method))},
            {"domain", corpus_name(cfg.domain, cfg.gen)},
            {"model", std::string(model)},
            {"seed", cfg.seed},
            {"m", m},
            {"context_chars", context_chars}};
  write_file(path, meta.dump(2) + "\n");
}

std::string run_label(const fs::path& dir) {
  std::vector<std::string> parts;
  for (const auto& part : dir) parts.push_back(part.string());
  const std::size_t keep = std::min<std::size_t>(4, parts.size());
  std::string out;
  for (std::size_t i = parts.size() - keep; i < parts.size(); ++i) out += (out.empty() ? "" : "/") + parts[i];
  return out;
}

}  // namespace

std::string_view to_string(Method m) { return kMethodNames[static_cast<int>(m)]; }

Method method_from_string(std::string_view name) {
  for (int i = 0; i < 8; ++i) {
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  }
  throw Error(fmt::format("unknown method '{}'", name));
}

std::string RunConfig::to_json() const {
  json j{{"domain", std::string(licl::to_string(domain))},
         {"size", gen.size},
         {"n_blocks", gen.n_blocks},
         {"wall_density", gen.wall_density},
         {"seed", seed},
         {"n_test", n_test},
         {"train_pool", train_pool},
         {"method", std::string(licl::to_string(method))},
         {"checkpoints", checkpoints},
         {"grid_scaffold", grid_scaffold},
         {"batch_flush", batch_flush},
         {"rag_budget", rag_budget},
         {"rag_mode", std::string(licl::to_string(rag_mode))},
         {"workers", workers},
         {"llm", llm},
         {"model_options", model_options}};
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(std::string_view text) {
  const json j = json::parse(text);
  RunConfig c;
  if (j.contains("domain")) c.domain = domain_kind_from_string(j["domain"].get<std::string>());
  c.gen.size = j.value("size", c.gen.size);
  c.gen.n_blocks = j.value("n_blocks", c.gen.n_blocks);
  c.gen.wall_density = j.value("wall_density", c.gen.wall_density);
  c.seed = j.value("seed", c.seed);
  c.n_test = j.value("n_test", c.n_test);
  c.train_pool = j.value("train_pool", c.train_pool);
  if (j.contains("method")) c.method = method_from_string(j["method"].get<std::string>());
  c.checkpoints = j.value("checkpoints", c.checkpoints);
  c.grid_scaffold = j.value("grid_scaffold", c.grid_scaffold);
  c.batch_flush = j.value("batch_flush", c.batch_flush);
  c.rag_budget = j.value("rag_budget", c.rag_budget);
  if (j.contains("rag_mode")) c.rag_mode = retrieval_mode_from_string(j["rag_mode"].get<std::string>());
  c.workers = j.value("workers", c.workers);
  c.llm = j.value("llm", c.llm);
  c.model_options = j.value("model_options", c.model_options);
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) throw Error("checkpoints must be ascending");
  if (batch_flush == 0) throw Error("batch_flush must be at least 1");
  if (n_test == 0) throw Error("n_test must be positive");
  if (n_test >= 50000 || train_pool >= 50000) throw Error("pools are limited to 49999 problems");
  if (rag_budget == 0) throw Error("rag_budget must be positive");
  if (workers == 0) throw Error("workers must be at least 1");
}

std::uint64_t test_seed(std::uint64_t base, std::size_t index) { return base * 100000 + index; }
std::uint64_t train_seed(std::uint64_t base, std::size_t index) { return base * 100000 + 50000 + index; }

std::string corpus_name(DomainKind kind, const GenerateParams& gen) {
  if (kind == DomainKind::blocksworld) return fmt::format("blocksworld_{}", gen.n_blocks);
  return fmt::format("{}_{}", licl::to_string(kind), gen.size > 0 ? gen.size : default_grid_size(kind));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
}

Corpus cmd_gen(const RunConfig& cfg, const fs::path& root) {
  cfg.validate();
  Corpus c;
  c.name = corpus_name(cfg.domain, cfg.gen);
  c.kind = cfg.domain;
  const fs::path dir = root / "problems" / c.name;
  json manifest{{"name", c.name},
                {"domain", std::string(licl::to_string(cfg.domain))},
                {"size", cfg.gen.size},
                {"n_blocks", cfg.gen.n_blocks},
                {"wall_density", cfg.gen.wall_density},
                {"seed", cfg.seed}};
  std::string hashed;
  for (const auto& [split, count] : {std::pair<std::string, std::size_t>{"test", cfg.n_test}, {"train", cfg.train_pool}}) {
    auto& dest = split == "test" ? c.test : c.train;
    json entries = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t seed = split == "test" ? test_seed(cfg.seed, i) : train_seed(cfg.seed, i);
      ProblemInstance p = generate_problem(cfg.domain, seed, cfg.gen);
      const std::string text = serialize_problem(p);
      const std::string env = environment_to_json(p.env);
      write_file(dir / split / (p.id + ".pddl"), text);
      write_file(dir / split / (p.id + ".json"), env + "\n");
      hashed += text;
      hashed += env;
      entries.push_back(json{{"id", p.id}, {"seed", seed}, {"optimal_len", optimal_length(p)}});
      dest.push_back(std::move(p));
    }
    manifest[split] = std::move(entries);
  }
  c.hash = fingerprint(hashed);
  manifest["hash"] = c.hash;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return c;
}

Corpus load_corpus(const fs::path& root, std::string_view name) {
  const fs::path dir = root / "problems" / std::string(name);
  const json manifest = json::parse(read_file(dir / "manifest.json"));
  Corpus c;
  c.name = manifest.at("name").get<std::string>();
  c.kind = domain_kind_from_string(manifest.at("domain").get<std::string>());
  c.hash = manifest.at("hash").get<std::string>();
  for (const std::string split : {"test", "train"}) {
    auto& dest = split == "test" ? c.test : c.train;
    for (const auto& e : manifest.at(split)) {
      const std::string id = e.at("id").get<std::string>();
      const Environment env = environment_from_json(read_file(dir / split / (id + ".json")));
      dest.push_back(parse_problem(read_file(dir / split / (id + ".pddl")), env));
    }
  }
  return c;
}

std::shared_ptr<ChatClient> make_client(std::string_view spec, const std::vector<ProblemInstance>& problems,
                                        const std::map<std::string, std::string>& model_options) {
  if (spec.substr(0, 5) == "mock:") {
    return std::make_shared<MockClient>(mock_policy_from_string(spec.substr(5)), problems);
  }
  if (spec.substr(0, 7) == "replay:") {
    auto client = std::make_shared<ScriptedClient>("replay");
    client->load_log(fs::path(std::string(spec.substr(7))));
    return client;
  }
  if (spec == "openai") {
    auto cfg = OpenAIConfig::from_env();
    if (!cfg) throw Error("LICL_ENDPOINT is not set");
    cfg->options = model_options;
    return std::make_shared<OpenAIClient>(*cfg);
  }
  throw Error(fmt::format("unknown llm '{}' (expected mock:<policy>, replay:<log> or openai)", spec));
}

fs::path run_dir(const fs::path& root, const RunConfig& cfg, std::string_view model) {
  return root / "runs" / corpus_name(cfg.domain, cfg.gen) / std::string(to_string(cfg.method)) / sanitize(model) /
         std::to_string(cfg.seed);
}

fs::path cmd_train(const RunConfig& cfg, const fs::path& root, ChatClient& llm, bool force) {
  cfg.validate();
  const Corpus corpus = load_corpus(root, corpus_name(cfg.domain, cfg.gen));
  RunConfig rc = cfg;
  rc.method = Method::licl;
  const fs::path dir = run_dir(root, rc, llm.model());
  prepare_dir(dir, force);
  write_file(dir / "config.json", rc.to_json());
  write_file(dir / "corpus_hash.txt", corpus.hash + "\n");

  RecordingClient recorder(borrow(llm), dir / "transcripts.jsonl");
  const PartialProgram base = base_program(cfg.domain, default_example_problems(cfg.domain, cfg.gen));
  TrainConfig tc;
  tc.batch_flush = cfg.batch_flush;
  tc.ascii_grid = cfg.grid_scaffold;
  const std::size_t last = cfg.checkpoints.empty() ? 0 : cfg.checkpoints.back();
  tc.max_training_problems = std::min(corpus.train.size(), last);

  std::vector<std::size_t> flushes;  // problems seen at each flush
  std::vector<PartialProgram> programs;
  TrainResult result = train(base, corpus.train, recorder, tc, [&](std::size_t seen, const PartialProgram& pp) {
    flushes.push_back(seen);
    programs.push_back(pp);
  });
  write_file(dir / "train_log.jsonl", result.log.to_jsonl());
  write_file(dir / "corrections.jsonl", corrections_jsonl(result.corrections));

  // Corrections extracted before each flush, counted from the log.
  std::vector<std::size_t> counts;
  std::size_t record = 0, taken = 0;
  for (std::size_t seen : flushes) {
    for (; record < seen; ++record) taken += result.log.records[record].correction_keys.size();
    counts.push_back(taken);
  }
  json snapshots = json::array();
  for (std::size_t m : cfg.checkpoints) {
    std::size_t f = 0;
    while (f + 1 < flushes.size() && flushes[f + 1] <= m) ++f;
    if (m > tc.max_training_problems) break;
    const std::vector<Correction> prefix(result.corrections.begin(),
                                         result.corrections.begin() + static_cast<std::ptrdiff_t>(counts[f]));
    const std::string program_text = programs[f].render();
    write_file(dir / "snapshots" / fmt::format("program_m{}.txt", m), program_text);
    write_file(dir / "snapshots" / fmt::format("corrections_m{}.jsonl", m), corrections_jsonl(prefix));
    snapshots.push_back(json{{"m", m},
                             {"problems_seen", flushes[f]},
                             {"corrections", prefix.size()},
                             {"examples", programs[f].correction_count()},
                             {"program_chars", program_text.size()}});
  }
  write_file(dir / "snapshots" / "index.json", snapshots.dump(2) + "\n");
  return dir;
}

fs::path cmd_eval(const RunConfig& cfg, const fs::path& root, ChatClient& llm, const fs::path& train_dir, bool force) {
  cfg.validate();
  const Corpus corpus = load_corpus(root, corpus_name(cfg.domain, cfg.gen));
  const fs::path dir = train_dir / "eval" / corpus.name;
  prepare_dir(dir, force);
  const json index = json::parse(read_file(train_dir / "snapshots" / "index.json"));
  const PartialProgram base = base_program(cfg.domain, default_example_problems(cfg.domain, cfg.gen));
  RecordingClient recorder(borrow(llm), dir / "transcripts.jsonl");
  RunConfig rc = cfg;
  rc.method = Method::licl;
  write_file(dir / "config.json", rc.to_json());
  write_file(dir / "corpus_hash.txt", corpus.hash + "\n");

  std::vector<Checkpoint> curve;
  for (const auto& snap : index) {
    const std::size_t m = snap.at("m").get<std::size_t>();
    const auto corrections = corrections_from_jsonl(read_file(train_dir / "snapshots" / fmt::format("corrections_m{}.jsonl", m)));
    const PartialProgram program = insert_corrections(base, corrections);
    std::vector<EvalRecord> records(corpus.test.size());
    std::vector<std::string> plans(corpus.test.size());
    parallel_for(corpus.test.size(), cfg.workers, [&](std::size_t i) {
      const ProblemInstance& p = corpus.test[i];
      std::vector<Action> plan;
      bool parsed = false;
      try {
        CompletionRequest req{licl_prompt(program, p, cfg.grid_scaffold), 1.0, 32000, fmt::format("licl-eval:m{}:{}", m, p.id)};
        const std::string response = recorder.complete(req);
        const Trace trace = parse_trace(response);
        plan = extract_plan(trace, response);
        parsed = trace.final_answer.has_value() || !plan.empty();
      } catch (const Error&) {
      }
      records[i] = validate_plan(p, plan, parsed);
      plans[i] = join_actions(plan);
    });
    const MetricSummary summary = summarize(records);
    write_file(dir / fmt::format("records_m{}.jsonl", m), to_jsonl(records));
    write_file(dir / fmt::format("summary_m{}.json", m), to_json(summary) + "\n");
    std::string plan_lines;
    for (std::size_t i = 0; i < plans.size(); ++i) plan_lines += corpus.test[i].id + "\t" + plans[i] + "\n";
    write_file(dir / fmt::format("plans_m{}.tsv", m), plan_lines);
    const std::size_t chars = program.render().size();
    write_meta(dir / fmt::format("meta_m{}.json", m), run_label(train_dir), rc, llm.model(), m,
               static_cast<double>(chars));
    curve.push_back({m, summary, chars});
  }
  write_file(dir / "learning_curve.csv", learning_curve(curve));
  return dir;
}

fs::path cmd_baseline(const RunConfig& cfg, const fs::path& root, ChatClient& llm, bool force) {
  cfg.validate();
  if (cfg.method == Method::licl) throw Error("use train/eval for the licl method");
  const Corpus corpus = load_corpus(root, corpus_name(cfg.domain, cfg.gen));
  const fs::path dir = run_dir(root, cfg, llm.model());
  prepare_dir(dir, force);
  write_file(dir / "config.json", cfg.to_json());
  write_file(dir / "corpus_hash.txt", corpus.hash + "\n");
  RecordingClient recorder(borrow(llm), dir / "transcripts.jsonl");
  MeterClient meter(recorder);

  RetrievalCorpus rag;
  if (cfg.method == Method::rag) {
    for (const auto& p : corpus.train) rag.add(p);
  }
  std::vector<EvalRecord> records(corpus.test.size());
  std::vector<std::string> plans(corpus.test.size());
  parallel_for(corpus.test.size(), cfg.workers, [&](std::size_t i) {
    const ProblemInstance& p = corpus.test[i];
    BaselineOutcome out;
    try {
      switch (cfg.method) {
        case Method::zero_shot: out = run_zero_shot(meter, p); break;
        case Method::rag: out = run_rag(meter, p, rag, cfg.rag_budget, cfg.rag_mode); break;
        case Method::sc: out = run_self_consistency(meter, cot_prompt(p)); break;
        case Method::sr: out = run_self_refine(meter, cot_prompt(p)); break;
        case Method::react: out = run_react(meter, p); break;
        case Method::react_oracle: out = run_react_oracle(meter, p); break;
        case Method::tot: out = run_tot(meter, p); break;
        case Method::licl: break;
      }
    } catch (const Error&) {
      out.plan.clear();
    }
    records[i] = validate_plan(p, out.plan, !out.plan.empty());
    plans[i] = join_actions(out.plan);
  });
  const MetricSummary summary = summarize(records);
  write_file(dir / "records.jsonl", to_jsonl(records));
  write_file(dir / "summary.json", to_json(summary) + "\n");
  std::string plan_lines;
  for (std::size_t i = 0; i < plans.size(); ++i) plan_lines += corpus.test[i].id + "\t" + plans[i] + "\n";
  write_file(dir / "plans.tsv", plan_lines);
  write_meta(dir / "meta.json", run_label(dir), cfg, llm.model(), 0, meter.mean_prompt_chars());
  return dir;
}

std::string cmd_report(const std::vector<fs::path>& dirs) {
  struct Row {
    std::string key;
    std::string line;
  };
  std::vector<Row> rows;
  for (const auto& d : dirs) {
    if (!fs::exists(d)) throw ReportError(fmt::format("{} does not exist", d.string()));
    std::vector<fs::path> summaries;
    for (const auto& entry : fs::recursive_directory_iterator(d)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("summary", 0) == 0 && entry.path().extension() == ".json") {
        summaries.push_back(entry.path());
      }
    }
    for (const auto& sp : summaries) {
      const std::string suffix = sp.stem().string().substr(7);  // "" or "_m30"
      const fs::path records_path = sp.parent_path() / ("records" + suffix + ".jsonl");
      const fs::path meta_path = sp.parent_path() / ("meta" + suffix + ".json");
      MetricSummary stored, recomputed;
      json meta;
      try {
        stored = metric_summary_from_json(read_file(sp));
        recomputed = summarize(eval_records_from_jsonl(read_file(records_path)));
        meta = json::parse(read_file(meta_path));
        meta.at("run");
        meta.at("method");
        meta.at("model");
        meta.at("m");
        meta.at("context_chars");
      } catch (const std::exception& e) {
        throw ReportError(fmt::format("{}: {}", sp.string(), e.what()));
      }
      if (!(stored == recomputed)) {
        throw ReportError(fmt::format("{} does not match the summary recomputed from {}", sp.string(), records_path.string()));
      }
      const std::string trap = recomputed.adjusted_trap_rate ? fmt::format("{:.4f}", *recomputed.adjusted_trap_rate) : "";
      const std::string line = fmt::format(
          "{},{},{},{},{},{},{},{},{},{},{},{:.0f}", meta["run"].get<std::string>(), meta.value("domain", std::string{}),
          meta["method"].get<std::string>(), meta["model"].get<std::string>(), meta["m"].get<std::size_t>(), recomputed.n,
          format_pct(recomputed.pct_valid), format_pct(recomputed.pct_success), format_pct(recomputed.pct_optimal),
          format_pct(recomputed.valid_success_gap), trap, meta["context_chars"].get<double>());
      rows.push_back({fmt::format("{}|{:08}|{}", meta["run"].get<std::string>(), meta["m"].get<std::size_t>(), line), line});
    }
  }
  if (rows.empty()) throw ReportError("no completed runs found");
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
  rows.erase(std::unique(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key == b.key; }), rows.end());
  std::string out = "run,domain,method,model,m,n,pct_valid,pct_success,pct_optimal,gap,adjusted_trap_rate,context_chars\n";
  for (const auto& r : rows) out += r.line + "\n";
  return out;
}

}  // namespace licl
