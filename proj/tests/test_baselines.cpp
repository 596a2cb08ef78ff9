#include <gtest/gtest.h>

#include "licl/baselines.hpp"
#include "licl/domain.hpp"
#include "licl/errors.hpp"
#include "licl/eval_metrics.hpp"
#include "licl/llm_gateway.hpp"
#include "licl/oracle.hpp"

using namespace licl;

namespace {

class CapturingClient final : public ChatClient {
 public:
  explicit CapturingClient(ChatClient& inner) : inner_(inner) {}
  std::string model() const override { return inner_.model(); }
  std::vector<CompletionRequest> requests;

 protected:
  std::string do_complete(const CompletionRequest& req) override {
    requests.push_back(req);
    return inner_.complete(req);
  }

 private:
  ChatClient& inner_;
};

std::string plan_reply(const char* plan) { return std::string("thinking\n**Final Action Sequence:** ") + plan; }

ProblemInstance open_grid(Coord start, Coord goal) {
  ProblemInstance p;
  p.id = "gw-task-1";
  GridSpec g(DomainKind::two_room, 6, 6);
  g.set_wall({3, 1});
  p.env = g;
  p.domain_name = domain_name_for(p.env);
  p.initial = GridState{start};
  p.goal = GridGoal{goal};
  return p;
}

RetrievalCorpus straddle_corpus() {
  RetrievalCorpus c;
  for (int i = 0; i < 3; ++i) {
    auto p = generate_problem(DomainKind::maze, 500 + i);
    c.add(p, std::string(4000, static_cast<char>('a' + i)));
  }
  return c;
}

}  // namespace

TEST(Similarity, Values) {
  EXPECT_DOUBLE_EQ(similarity(7, 7), 1.0);
  EXPECT_DOUBLE_EQ(similarity(3, 6), 0.25);
  EXPECT_DOUBLE_EQ(similarity(6, 3), 0.25);
}

TEST(Retrieval, StrictAndGenerousBudgets) {
  const auto c = straddle_corpus();
  const auto q = generate_problem(DomainKind::maze, 9);
  EXPECT_EQ(retrieve_examples(q, c, 10000, RetrievalMode::strict).size(), 2u);
  EXPECT_EQ(retrieve_examples(q, c, 10000, RetrievalMode::generous).size(), 3u);
  EXPECT_THROW(retrieve_examples(q, c, 0, RetrievalMode::strict), Error);
  EXPECT_TRUE(retrieve_examples(q, RetrievalCorpus{}, 100, RetrievalMode::generous).empty());
}

TEST(Retrieval, FixedPutsPinnedFirst) {
  auto c = straddle_corpus();
  c.pinned = {2};
  const auto q = generate_problem(DomainKind::maze, 9);
  const auto got = retrieve_examples(q, c, 10000, RetrievalMode::fixed);
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got.front(), c.entries[2].trajectory);
  EXPECT_EQ(retrieval_mode_from_string(to_string(RetrievalMode::generous)), RetrievalMode::generous);
}

TEST(Retrieval, MostSimilarFirst) {
  RetrievalCorpus c;
  const auto q = open_grid({1, 1}, {1, 5});
  c.add(open_grid({1, 1}, {6, 6}), "far");
  c.add(open_grid({1, 1}, {1, 4}), "near");
  const auto got = retrieve_examples(q, c, 100, RetrievalMode::strict);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0], "near");
}

TEST(SelfConsistency, MajorityVote) {
  ScriptedClient s;
  for (const char* plan : {"move-north", "move-north", "move-east", "move-north", "move-east"}) s.push(plan_reply(plan));
  CapturingClient llm(s);
  const auto out = run_self_consistency(llm, "PROMPT", 5);
  ASSERT_EQ(out.plan.size(), 1u);
  EXPECT_EQ(out.plan[0], Action::move(Direction::north));
  ASSERT_EQ(llm.requests.size(), 5u);
  for (const auto& r : llm.requests) EXPECT_DOUBLE_EQ(r.temperature, 1.0);
  EXPECT_EQ(llm.requests[2].tag, "sc:3/5");
}

TEST(SelfConsistency, SingleSample) {
  ScriptedClient s;
  s.push(plan_reply("move-west"));
  EXPECT_EQ(run_self_consistency(s, "PROMPT", 1).plan, std::vector<Action>{Action::move(Direction::west)});
  EXPECT_EQ(s.call_count(), 1u);
  EXPECT_THROW(run_self_consistency(s, "PROMPT", 0), Error);
}

TEST(SelfConsistency, TieBreakPicksNamedCandidate) {
  ScriptedClient s;
  for (const char* plan : {"move-north", "move-east", "move-north", "move-east"}) s.push(plan_reply(plan));
  s.push("Selected candidate: 2");
  CapturingClient llm(s);
  const auto out = run_self_consistency(llm, "PROMPT", 4);
  EXPECT_EQ(out.plan, std::vector<Action>{Action::move(Direction::east)});
  ASSERT_EQ(llm.requests.size(), 5u);
  EXPECT_NE(llm.requests.back().prompt.find("Candidate 1:"), std::string::npos);
  EXPECT_NE(llm.requests.back().prompt.find("Candidate 2:"), std::string::npos);
}

TEST(SelfConsistency, UnreadableTieBreakKeepsFirst) {
  ScriptedClient s;
  s.push(plan_reply("move-north"));
  s.push(plan_reply("move-east"));
  s.push("no idea");
  const auto out = run_self_consistency(s, "PROMPT", 2);
  EXPECT_EQ(out.plan, std::vector<Action>{Action::move(Direction::north)});
  EXPECT_FALSE(out.diagnostics.empty());
}

TEST(SelfRefine, StopsOnPhrase) {
  ScriptedClient s;
  s.push(plan_reply("move-north, move-north"));
  s.push(plan_reply("move-north") + "\n**No further refinement needed.**");
  const auto out = run_self_refine(s, "PROMPT", 5);
  EXPECT_EQ(s.call_count(), 2u);
  EXPECT_EQ(out.plan, std::vector<Action>{Action::move(Direction::north)});
}

TEST(SelfRefine, RunsAllRounds) {
  ScriptedClient s;
  for (int i = 0; i < 4; ++i) s.push(plan_reply("move-south"));
  CapturingClient llm(s);
  run_self_refine(llm, "PROMPT", 3);
  ASSERT_EQ(llm.requests.size(), 4u);
  EXPECT_NE(llm.requests[1].prompt.find("move-south"), std::string::npos);
}

TEST(ReactOracle, ValidFirstPlanIsOneCall) {
  const auto p = open_grid({1, 1}, {1, 3});
  ScriptedClient s;
  s.push(plan_reply("move-north, move-north"));
  const auto out = run_react_oracle(s, p);
  EXPECT_EQ(s.call_count(), 1u);
  EXPECT_TRUE(validate_plan(p, out.plan).success);
}

TEST(ReactOracle, InvalidStepFeedback) {
  const auto p = open_grid({2, 1}, {4, 1});
  const auto fb = oracle_feedback(p, {Action::move(Direction::east), Action::move(Direction::east)});
  ASSERT_TRUE(fb.has_value());
  EXPECT_NE(fb->find("ERROR at step 1"), std::string::npos);
  EXPECT_NE(fb->find("'move-east'"), std::string::npos);

  ScriptedClient s;
  s.push(plan_reply("move-east, move-east"));
  s.push(plan_reply("move-north, move-east, move-east, move-south"));
  CapturingClient llm(s);
  const auto out = run_react_oracle(llm, p);
  ASSERT_EQ(llm.requests.size(), 2u);
  EXPECT_DOUBLE_EQ(llm.requests[1].temperature, 0.3);
  EXPECT_NE(llm.requests[1].prompt.find("ERROR at step 1"), std::string::npos);
  EXPECT_TRUE(validate_plan(p, out.plan).success);
}

TEST(ReactOracle, IncompleteFeedback) {
  const auto p = open_grid({1, 1}, {1, 4});
  const auto fb = oracle_feedback(p, {Action::move(Direction::north)});
  ASSERT_TRUE(fb.has_value());
  EXPECT_NE(fb->find("INCOMPLETE"), std::string::npos);
  EXPECT_NE(fb->find("all 1 actions"), std::string::npos);
  EXPECT_FALSE(oracle_feedback(p, optimal_plan(p)).has_value());
}

TEST(ToT, Ordering) {
  ToTNode a, b;
  a.confidence = b.confidence = 80;
  a.action_prefix.assign(8, Action::move(Direction::north));
  b.action_prefix.assign(10, Action::move(Direction::north));
  EXPECT_TRUE(tot_better(a, b));
  EXPECT_FALSE(tot_better(b, a));
  b.confidence = 90;
  EXPECT_TRUE(tot_better(b, a));
}

TEST(ToT, ParseCandidates) {
  std::vector<std::string> diag;
  const auto nodes = parse_tot_candidates(
      R"(Here: [{"thought": "go up", "proposed_actions": ["up", "up", "up"], "confidence": 150},
                {"thought": "bad", "proposed_actions": ["fly"], "confidence": 10},
                {"thought": "done", "proposed_actions": [], "confidence": -5, "is_terminal": true,
                 "final_plan": ["move-east"]}])",
      {Action::move(Direction::west)}, 2, &diag);
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_EQ(nodes[0].confidence, 100);
  EXPECT_EQ(nodes[0].action_prefix.size(), 3u);
  EXPECT_EQ(nodes[0].action_prefix[0], Action::move(Direction::west));
  EXPECT_EQ(nodes[1].confidence, 0);
  EXPECT_TRUE(nodes[1].is_terminal);
  EXPECT_EQ(nodes[1].plan_length(), 1u);
  EXPECT_EQ(diag.size(), 1u);
  EXPECT_TRUE(parse_tot_candidates("not json", {}, 4).empty());
}

TEST(ToT, CallBudget) {
  const auto p = open_grid({1, 1}, {1, 4});
  ScriptedClient s;
  const std::string expand =
      R"([{"thought": "a", "proposed_actions": ["move-north"], "confidence": 60},
          {"thought": "b", "proposed_actions": ["move-east"], "confidence": 40}])";
  for (int i = 0; i < 20; ++i) s.push(expand);
  ToTParams params{2, 3, 4};
  run_tot(s, p, params);
  EXPECT_LE(s.call_count(), static_cast<std::size_t>(1 + params.breadth * params.depth + 1));
}

TEST(ToT, CertainTerminalStopsEarly) {
  const auto p = open_grid({1, 1}, {1, 3});
  ScriptedClient s;
  s.push(R"([{"thought": "direct", "proposed_actions": ["move-north", "move-north"], "confidence": 100,
             "is_terminal": true}])");
  const auto out = run_tot(s, p);
  EXPECT_EQ(s.call_count(), 1u);
  EXPECT_TRUE(validate_plan(p, out.plan).success);
}

TEST(Prompts, CotAnswerPattern) {
  const auto p = generate_problem(DomainKind::maze, 4);
  EXPECT_NE(cot_prompt(p).find("Final Action Sequence"), std::string::npos);
  EXPECT_NE(cot_prompt(p, "EXAMPLE-TEXT").find("EXAMPLE-TEXT"), std::string::npos);
  EXPECT_NE(react_prompt(p).find(start_position_text(p)), std::string::npos);
}

TEST(Baselines, OraclePerfectMockIsOptimalEverywhere) {
  for (DomainKind k : {DomainKind::maze, DomainKind::full_sokoban}) {
    const auto p = generate_problem(k, 21);
    MockClient mock(MockPolicy::oracle_perfect, {p});
    RetrievalCorpus corpus;
    corpus.add(generate_problem(k, 22));
    const std::vector<BaselineOutcome> outs{run_zero_shot(mock, p),
                                            run_rag(mock, p, corpus),
                                            run_self_consistency(mock, cot_prompt(p)),
                                            run_self_refine(mock, cot_prompt(p)),
                                            run_react(mock, p),
                                            run_react_oracle(mock, p),
                                            run_tot(mock, p)};
    for (std::size_t i = 0; i < outs.size(); ++i) {
      EXPECT_TRUE(validate_plan(p, outs[i].plan).optimal) << p.id << " baseline " << i;
    }
  }
}
