#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "madil/expressions.hpp"

using namespace madil;

TEST_CASE("eval: the paper's running expression") {
  // add(size(x), (1,1)) on {x -> 2x2 grid} returns (3,3)
  Environment env;
  env.bind(0, Value(make_grid(GridKind::Full, {{1, 1}, {1, 0}})));
  auto size_x = Expression::app({Fn::Size, 0}, {Expression::var(0)});
  auto e = Expression::app({Fn::VAdd, 1}, {size_x});
  auto r = eval(*e, env);
  REQUIRE(r.has_value());
  CHECK(*r == vec_v(3, 3));
}

TEST_CASE("eval: constants and unbound variables") {
  Environment env;
  env.bind(0, int_v(5));
  auto c = Expression::constant(color_v(7));
  CHECK(*eval(*c, env) == color_v(7));
  auto y = Expression::var(99);
  CHECK(!eval(*y, env).has_value());
}

TEST_CASE("eval is pure") {
  Environment env;
  env.bind(0, int_v(4));
  auto e = Expression::app({Fn::Add, 2}, {Expression::var(0)});
  CHECK(*eval(*e, env) == *eval(*e, env));
}

TEST_CASE("expression size counts symbols including static constants") {
  // Vec pattern + add(x,1) + x + 1 + ? has size 5 overall; here the
  // expression alone: add(x, 1) = add + x + 1 = 3 symbols
  auto e = Expression::app({Fn::Add, 1}, {Expression::var(0)});
  CHECK(size(*e) == 3);
  CHECK(size(*Expression::var(0)) == 1);
  CHECK(size(*Expression::constant(int_v(9))) == 1);
}

TEST_CASE("item-wise lifted application of scalar functions") {
  Environment env;
  env.bind(0, seq_v(1, {int_v(1), int_v(2)}));
  auto e = Expression::app({Fn::Add, 1}, {Expression::var(0)});
  auto r = eval(*e, env);
  REQUIRE(r.has_value());
  CHECK(*r == seq_v(1, {int_v(2), int_v(3)}));
}

TEST_CASE("sequence functions") {
  Environment env;
  env.bind(0, seq_v(1, {int_v(3), int_v(1), int_v(2)}));
  auto len = Expression::app({Fn::Length, 0}, {Expression::var(0)});
  CHECK(*eval(*len, env) == int_v(3));
  auto tail = Expression::app({Fn::TailSeq, 0}, {Expression::var(0)});
  CHECK(*eval(*tail, env) == seq_v(1, {int_v(1), int_v(2)}));
  auto rev = Expression::app({Fn::ReverseSeq, 0}, {Expression::var(0)});
  CHECK(*eval(*rev, env) == seq_v(1, {int_v(2), int_v(1), int_v(3)}));
  auto first = Expression::app({Fn::IndexSeq, 0}, {Expression::var(0)});
  CHECK(*eval(*first, env) == int_v(3));
  auto last = Expression::app({Fn::IndexSeq, -1}, {Expression::var(0)});
  CHECK(*eval(*last, env) == int_v(2));
  auto mx = Expression::app({Fn::MaxSeq, 0}, {Expression::var(0)});
  CHECK(*eval(*mx, env) == int_v(3));
}

TEST_CASE("printing uses prefix form with function names") {
  auto size_x = Expression::app({Fn::Size, 0}, {Expression::var(0)});
  auto e = Expression::app({Fn::VAdd, 1}, {size_x});
  auto namer = [](VarId) { return std::string("x"); };
  CHECK(to_string(*e, namer) == "vadd(size(x), 1)");
}

TEST_CASE("DAG: size-1 layer indexes the variables") {
  Environment env;
  env.bind(0, int_v(1));
  ExprDAG dag = ExprDAG::build({env}, {0}, 1, 1000);
  auto hits = dag.lookup({int_v(1)});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0]->is_var());
}

TEST_CASE("DAG: size-2 enumeration finds applications") {
  Environment env;
  env.bind(0, int_v(2));
  ExprDAG dag = ExprDAG::build({env}, {0}, 3, 10000);
  auto hits = dag.lookup({int_v(3)});  // add(x, 1)
  REQUIRE(!hits.empty());
  CHECK(hits[0]->is_app());
  CHECK(size(*hits[0]) == 3);
  CHECK(dag.lookup({int_v(-7)}).empty());
}

TEST_CASE("DAG: identical value vectors collapse to one node") {
  Environment e1, e2;
  e1.bind(0, int_v(1));
  e1.bind(1, int_v(1));
  e2.bind(0, int_v(4));
  e2.bind(1, int_v(4));
  ExprDAG dag = ExprDAG::build({e1, e2}, {0, 1}, 2, 10000);
  // x and y have identical value vectors -> a single retrievable node
  auto hits = dag.lookup({int_v(1), int_v(4)});
  CHECK(hits.size() == 1);
  CHECK(size(*hits[0]) == 1);
}

TEST_CASE("DAG completeness against exhaustive enumeration at small scale") {
  Environment e1, e2;
  e1.bind(0, int_v(2));
  e1.bind(1, vec_v(1, 2));
  e2.bind(0, int_v(5));
  e2.bind(1, vec_v(0, 3));
  std::vector<Environment> envs{e1, e2};
  ExprDAG dag = ExprDAG::build(envs, {0, 1}, 3, 100000);
  CHECK(!dag.truncated());

  // Oracle: enumerate every expression of size <= 3 over the same catalog
  // shape (variable, f(variable)) and collect reachable value vectors.
  std::set<std::vector<Value>, bool (*)(const std::vector<Value>&, const std::vector<Value>&)>
      expected([](const std::vector<Value>& a, const std::vector<Value>& b) {
        for (size_t k = 0; k < a.size() && k < b.size(); ++k)
          if (int c = compare(a[k], b[k])) return c < 0;
        return a.size() < b.size();
      });
  for (VarId x : {0, 1}) {
    std::vector<Value> base;
    for (auto& env : envs) base.push_back(*env.lookup(x));
    expected.insert(base);
    for (const FunctionId& f : arc_functions()) {
      if (1 + static_count(f.fn) + 1 > 3) continue;
      std::vector<Value> vec;
      bool ok = true;
      for (auto& env : envs) {
        auto r = apply_lifted(f, *env.lookup(x));
        if (!r) { ok = false; break; }
        vec.push_back(*r);
      }
      if (ok) expected.insert(vec);
    }
  }
  for (const auto& vec : expected) {
    CAPTURE(to_string(vec[0]));
    CHECK(!dag.lookup(vec).empty());
  }
}

TEST_CASE("DAG: expressions undefined on any example are dropped") {
  Environment e1, e2;
  e1.bind(0, int_v(4));
  e2.bind(0, int_v(3));  // div(x,2) undefined here
  ExprDAG dag = ExprDAG::build({e1, e2}, {0}, 2, 10000);
  for (const auto& n : dag.nodes()) {
    for (size_t k = 0; k < 2; ++k) CHECK(n.values.size() == 2);
  }
  CHECK(dag.lookup({int_v(2), int_v(1)}).empty());  // would need div by 2
}

TEST_CASE("node count cap truncates silently") {
  Environment env;
  env.bind(0, int_v(2));
  ExprDAG dag = ExprDAG::build({env}, {0}, 6, 5);
  CHECK(dag.truncated());
  CHECK(dag.nodes().size() <= 5);
}
