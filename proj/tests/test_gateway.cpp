#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "licl/domain.hpp"
#include "licl/errors.hpp"
#include "licl/llm_gateway.hpp"
#include "licl/oracle.hpp"
#include "licl/problem_codec.hpp"
#include "licl/prompt_forge.hpp"
#include "licl/trace_codec.hpp"
#include "support/test_oracles.hpp"

using namespace licl;
namespace fs = std::filesystem;
namespace to = testing_oracles;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "licl_gateway_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

ProblemInstance reference() {
  ProblemInstance p;
  p.id = "gw-task-351";
  p.env = to::load_ascii_maze(to::fixture("reference_maze_10x10.txt"), 10, 10);
  p.domain_name = "gridworld-10x10";
  p.initial = GridState{{9, 5}};
  p.goal = GridGoal{{5, 10}};
  return p;
}

PartialProgram maze_base() {
  return base_program(DomainKind::maze, default_example_problems(DomainKind::maze));
}

// Local chat-completions server; replies with the queued statuses in order,
// then 200 forever.
class FakeServer {
 public:
  explicit FakeServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    svr_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const std::size_t n = hits_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      const int status = n < statuses_.size() ? statuses_[n] : 200;
      res.status = status;
      if (status == 200) {
        res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "hello"}}]})",
                        "application/json");
      } else {
        res.set_content("{}", "application/json");
      }
    });
    port_ = svr_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }
  ~FakeServer() {
    svr_.stop();
    thread_.join();
  }

  OpenAIConfig config() const {
    OpenAIConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    c.api_key = "k-test";
    c.model = "fake-model";
    c.requests_per_minute = 0;
    c.max_attempts = 3;
    c.initial_backoff = std::chrono::milliseconds(5);
    c.timeout = std::chrono::seconds(10);
    return c;
  }
  std::size_t hits() const { return hits_.load(); }
  std::string last_body() const { return last_body_; }
  std::string last_auth() const { return last_auth_; }

 private:
  std::vector<int> statuses_;
  httplib::Server svr_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<std::size_t> hits_{0};
  std::string last_body_;
  std::string last_auth_;
};

}  // namespace

TEST(Scripted, FingerprintThenQueue) {
  ScriptedClient s;
  s.add("a", "for a");
  s.push("queued 1");
  s.push("queued 2");
  EXPECT_EQ(s.complete("b", 1.0), "queued 1");
  EXPECT_EQ(s.complete("a", 1.0), "for a");
  EXPECT_EQ(s.complete("a", 1.0), "queued 2");
  EXPECT_THROW(s.complete("a", 1.0), TransportError);
  EXPECT_EQ(s.call_count(), 4u);
}

TEST(Client, RequestChecks) {
  ScriptedClient s;
  s.push("x");
  EXPECT_THROW(s.complete("", 1.0), TransportError);
  EXPECT_THROW(s.complete("p", -0.1), TransportError);
  s.set_max_prompt_chars(4);
  EXPECT_THROW(s.complete("12345", 1.0), PromptTooLarge);
  EXPECT_EQ(s.complete("1234", 1.0), "x");
}

TEST(Recording, ReplayReproducesResponses) {
  const fs::path log = temp_path("record.jsonl");
  const auto p = generate_problem(DomainKind::maze, 3);
  auto mock = std::make_shared<MockClient>(MockPolicy::wall_blind, std::vector<ProblemInstance>{p});
  RecordingClient rec(mock, log);
  const std::string prompt = licl_prompt(maze_base(), p, true);
  const std::string first = rec.complete(prompt, 1.0);
  const std::string second = rec.complete(prompt + "\n", 0.5);

  ScriptedClient replay;
  replay.load_log(log);
  EXPECT_EQ(replay.complete(prompt + "\n", 0.5), second);
  EXPECT_EQ(replay.complete(prompt, 1.0), first);
  EXPECT_THROW(replay.load_log(temp_path("missing.jsonl")), TransportError);
}

TEST(PromptModes, Detection) {
  const auto p = generate_problem(DomainKind::maze, 3);
  EXPECT_EQ(detect_prompt_mode(licl_prompt(maze_base(), p, true)), PromptMode::program_trace);
  EXPECT_EQ(detect_prompt_mode("plain question"), PromptMode::cot);
  EXPECT_EQ(detect_prompt_mode("x\nORACLE FEEDBACK: bad"), PromptMode::react_feedback);
  EXPECT_EQ(detect_prompt_mode("### Self-Refinement Attempt 2"), PromptMode::refine);
  EXPECT_EQ(detect_prompt_mode("Return ONLY the JSON array"), PromptMode::tot_expand);
  EXPECT_EQ(detect_prompt_mode("end with Selected candidate: N"), PromptMode::tie_break);
  EXPECT_EQ(mock_policy_from_string(to_string(MockPolicy::wall_blind)), MockPolicy::wall_blind);
}

TEST(Mock, OraclePerfectReferenceTrace) {
  const auto p = reference();
  MockClient mock(MockPolicy::oracle_perfect, {p});
  const std::string prompt = licl_prompt(maze_base(), p, true);
  ASSERT_NE(mock.locate(prompt), nullptr);
  EXPECT_EQ(mock.locate(prompt)->id, p.id);
  const std::string reply = mock.complete(prompt, 1.0);
  EXPECT_EQ(reply, to::fixture("reference_trace_351.txt"));
  EXPECT_EQ(reply, mock.complete(prompt, 1.0));
}

TEST(Mock, WallBlindHitsAWall) {
  const auto p = reference();
  MockClient mock(MockPolicy::wall_blind, {p});
  const Trace t = parse_trace(mock.complete(licl_prompt(maze_base(), p, true), 1.0));
  bool wrong_applicable = false;
  for (const auto& c : t.calls) {
    if (c.name != "get_applicable_actions" || !c.output || !c.args) continue;
    const auto truth = answer(c.name, *c.args, p);
    if (!output_matches(truth, *c.output, p)) {
      wrong_applicable = true;
      break;
    }
  }
  EXPECT_TRUE(wrong_applicable);
}

TEST(Mock, UnknownProblem) {
  MockClient mock(MockPolicy::oracle_perfect, {generate_problem(DomainKind::maze, 1)});
  EXPECT_EQ(mock.locate("what is the capital of France"), nullptr);
  EXPECT_NE(mock.complete("what is the capital of France", 1.0).find("could not identify"), std::string::npos);
}

TEST(OpenAI, SendsChatCompletionBody) {
  FakeServer server({});
  auto cfg = server.config();
  cfg.options["top_p"] = "0.9";
  OpenAIClient client(cfg);
  EXPECT_EQ(client.complete("hi there", 0.25, 77), "hello");
  const auto body = nlohmann::json::parse(server.last_body());
  EXPECT_EQ(body["model"], "fake-model");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hi there");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.25);
  EXPECT_EQ(body["max_tokens"], 77);
  EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 0.9);
  EXPECT_EQ(server.last_auth(), "Bearer k-test");
}

TEST(OpenAI, RetriesServerErrors) {
  FakeServer server({500, 503});
  OpenAIClient client(server.config());
  EXPECT_EQ(client.complete("hi", 1.0), "hello");
  EXPECT_EQ(server.hits(), 3u);
}

TEST(OpenAI, ClientErrorIsFinal) {
  FakeServer server({400});
  OpenAIClient client(server.config());
  EXPECT_THROW(client.complete("hi", 1.0), TransportError);
  EXPECT_EQ(server.hits(), 1u);
}

TEST(OpenAI, GivesUpAfterMaxAttempts) {
  FakeServer server({500, 500, 500, 500});
  OpenAIClient client(server.config());
  EXPECT_THROW(client.complete("hi", 1.0), TransportError);
  EXPECT_EQ(server.hits(), 3u);
}

TEST(OpenAI, BadEndpoint) {
  OpenAIConfig cfg;
  cfg.endpoint = "no-scheme";
  EXPECT_THROW(OpenAIClient{cfg}, TransportError);
}
