#include <benchmark/benchmark.h>

#include "madil/engine.hpp"
#include "madil/refinement.hpp"
#include "madil/search.hpp"

using namespace madil;

namespace {

Grid checker(int h, int w) {
  Grid g(GridKind::Full, h, w, 0);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) g.at(i, j) = static_cast<std::uint8_t>((i + j) % 2 ? 3 : 0);
  return g;
}

Grid shape_grid(int h, int w) {
  Grid g(GridKind::Full, h, w, 0);
  for (int i = 1; i + 1 < h; ++i)
    for (int j = 1; j + 1 < w; ++j) g.at(i, j) = 4;
  return g;
}

PatternInstance inst(PatternName n, GridKind k = GridKind::Full) {
  PatternInstance p;
  p.id.name = n;
  p.id.kind = k;
  return p;
}

}  // namespace

static void BM_motif_decompose(benchmark::State& state) {
  Grid g = checker(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  Environment env;
  for (auto _ : state) {
    auto s = decompose(inst(PatternName::MotifP), env, Value(g));
    benchmark::DoNotOptimize(s.next());
  }
}
BENCHMARK(BM_motif_decompose)->Arg(6)->Arg(12)->Arg(24);

static void BM_parse_bgcolor_monocolor(benchmark::State& state) {
  Grid g = shape_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  auto model = ModelNode::pattern(
      0, inst(PatternName::BgColor),
      {ModelNode::unknown(1),
       ModelNode::pattern(2, inst(PatternName::Monocolor, GridKind::Sprite),
                          {ModelNode::unknown(3), ModelNode::unknown(4)})});
  Environment env;
  Distribution V{GridDist::full_grid()};
  for (auto _ : state) {
    auto s = parse(V, model, env, Value(g));
    benchmark::DoNotOptimize(s.next());
  }
}
BENCHMARK(BM_parse_bgcolor_monocolor)->Arg(6)->Arg(15)->Arg(30);

static void BM_expr_dag_build(benchmark::State& state) {
  Environment env;
  env.bind(0, Value(shape_grid(8, 8)));
  env.bind(1, Value(checker(6, 6)));
  for (auto _ : state) {
    ExprDAG dag = ExprDAG::build({env}, {0, 1}, static_cast<int>(state.range(0)), 1000);
    benchmark::DoNotOptimize(dag.nodes().size());
  }
}
BENCHMARK(BM_expr_dag_build)->Arg(3)->Arg(4)->Arg(6);

static void BM_describe_m0(benchmark::State& state) {
  TaskModel M0 = TaskModel::initial();
  ParseParams p;
  Value in{shape_grid(10, 10)}, out{checker(10, 10)};
  for (auto _ : state) {
    auto ds = describe(M0, in, out, p);
    benchmark::DoNotOptimize(ds.size());
  }
}
BENCHMARK(BM_describe_m0);

static void BM_solve_echo(benchmark::State& state) {
  TrainingSet t;
  t.examples = {{Value(shape_grid(4, 5)), Value(shape_grid(4, 5))},
                {Value(checker(3, 4)), Value(checker(3, 4))}};
  t.test_inputs = {Value(checker(5, 5))};
  SearchParams p;
  p.budget_seconds = 30;
  for (auto _ : state) {
    auto r = solve_task(t, p);
    benchmark::DoNotOptimize(r.log.solved);
  }
}
BENCHMARK(BM_solve_echo)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
