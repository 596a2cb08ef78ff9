#include <benchmark/benchmark.h>

#include "licl/domain.hpp"
#include "licl/oracle.hpp"
#include "licl/trace_codec.hpp"

using namespace licl;

namespace {

std::vector<ProblemInstance> problems(DomainKind k, std::size_t n) {
  std::vector<ProblemInstance> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_problem(k, 90000 + i));
  return out;
}

}  // namespace

static void BM_OptimalPlanMaze(benchmark::State& state) {
  const auto ps = problems(DomainKind::maze, 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(optimal_plan(ps[i++ % ps.size()]));
}
BENCHMARK(BM_OptimalPlanMaze);

static void BM_OptimalPlanSokoban(benchmark::State& state) {
  const auto ps = problems(DomainKind::full_sokoban, 16);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(optimal_plan(ps[i++ % ps.size()]));
}
BENCHMARK(BM_OptimalPlanSokoban);

static void BM_IsTrap(benchmark::State& state) {
  const auto p = generate_problem(DomainKind::full_sokoban, 7);
  const auto& g = std::get<GridSpec>(p.env);
  const auto& goal = std::get<SokobanGoal>(p.goal);
  const auto cells = g.open_cells();
  const Coord agent = std::get<SokobanState>(p.initial).agent;
  std::size_t i = 0;
  for (auto _ : state) {
    const Coord box = cells[i++ % cells.size()];
    if (box == agent) continue;
    benchmark::DoNotOptimize(is_trap(SokobanState{agent, box}, g, goal));
  }
}
BENCHMARK(BM_IsTrap);

static void BM_ParseTrace(benchmark::State& state) {
  const auto ps = problems(DomainKind::maze, 8);
  std::vector<std::string> traces;
  for (const auto& p : ps) traces.push_back(render_oracle_trace(p));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(parse_trace(traces[i++ % traces.size()]));
}
BENCHMARK(BM_ParseTrace);

static void BM_RecommendedActions(benchmark::State& state) {
  const std::vector<Block> blocks{'A', 'B', 'C', 'D', 'E'};
  const auto states = enumerate_block_states(blocks);
  const BlocksGoal goal{states[states.size() / 2].on};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(get_recommended_actions(states[i++ % states.size()], goal));
}
BENCHMARK(BM_RecommendedActions);
BENCHMARK_MAIN();
