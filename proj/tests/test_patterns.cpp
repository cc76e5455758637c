#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "madil/grid_ops.hpp"
#include "madil/patterns.hpp"

using namespace madil;

namespace {

const int T = kTransparent;

PatternInstance inst(PatternName n, GridKind k = GridKind::Full, int d = 0, int lift = 0) {
  PatternInstance p;
  p.id.name = n;
  p.id.kind = k;
  p.id.d = d;
  p.lift = lift;
  return p;
}

Environment no_env;

std::vector<std::vector<Value>> all_decomps(const PatternInstance& p, const Value& v,
                                            const Environment& env = no_env, int cap = 200) {
  auto s = decompose(p, env, v);
  std::vector<std::vector<Value>> out;
  while (auto t = s.next()) {
    out.push_back(std::move(*t));
    if (static_cast<int>(out.size()) >= cap) break;
  }
  return out;
}

}  // namespace

TEST_CASE("BgColor composes the running-example grid") {
  // black background + red sprite -> [[2,2],[0,2]]
  Grid sprite = make_grid(GridKind::Sprite, {{2, 2}, {T, 2}});
  auto v = compose(inst(PatternName::BgColor), no_env, {color_v(kBlack), Value(sprite)});
  REQUIRE(v.has_value());
  CHECK(v->as_grid() == make_grid(GridKind::Full, {{2, 2}, {0, 2}}));
}

TEST_CASE("Monocolor on a sprite yields the single color and the mask") {
  Grid sprite = make_grid(GridKind::Sprite, {{2, 2}, {T, 2}});
  auto ds = all_decomps(inst(PatternName::Monocolor, GridKind::Sprite), Value(sprite));
  REQUIRE(ds.size() == 1);
  CHECK(ds[0][0] == color_v(2));
  CHECK(ds[0][1].as_grid() == make_grid(GridKind::Mask, {{0, 0}, {T, 0}}));
}

TEST_CASE("IsFull rejects sprites with transparent cells") {
  Grid holed = make_grid(GridKind::Sprite, {{1, T}});
  CHECK(all_decomps(inst(PatternName::IsFull, GridKind::Sprite), Value(holed)).empty());
  Grid full = make_grid(GridKind::Sprite, {{1, 2}});
  auto ds = all_decomps(inst(PatternName::IsFull, GridKind::Sprite), Value(full));
  REQUIRE(ds.size() == 1);
  CHECK(ds[0][0].as_grid().kind == GridKind::Full);
}

TEST_CASE("Vec is a pure constructor") {
  auto v = compose(inst(PatternName::Vec), no_env, {int_v(3), int_v(3)});
  REQUIRE(v.has_value());
  CHECK(*v == vec_v(3, 3));
}

TEST_CASE("Repeat recomposes with target lengths from context") {
  // [[1,1],[2,2,2]] compresses at the inner axis to [1,2]
  Value whole = seq_v(2, {seq_v(1, {int_v(1), int_v(1)}),
                          seq_v(1, {int_v(2), int_v(2), int_v(2)})});
  auto p = inst(PatternName::Repeat, GridKind::Full, 1);
  auto ds = all_decomps(p, whole);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0][0] == seq_v(1, {int_v(1), int_v(2)}));

  SeqDist sd;
  sd.depth = 2;
  sd.item = Distribution::make(IntDist::any());
  sd.shape = SeqShape{2, {SeqShape{2, {}}, SeqShape{3, {}}}};
  Distribution V{sd};
  auto back = compose(p, no_env, ds[0], &V);
  REQUIRE(back.has_value());
  CHECK(*back == whole);
}

TEST_CASE("Cons axis semantics match the catalog") {
  Value whole = seq_v(2, {seq_v(1, {int_v(0), int_v(1), int_v(2)}),
                          seq_v(1, {int_v(3), int_v(4), int_v(5)})});
  auto d0 = all_decomps(inst(PatternName::Cons, GridKind::Full, 0), whole);
  REQUIRE(d0.size() == 1);
  CHECK(d0[0][0] == seq_v(1, {int_v(0), int_v(1), int_v(2)}));
  CHECK(d0[0][1] == seq_v(2, {seq_v(1, {int_v(3), int_v(4), int_v(5)})}));

  auto d1 = all_decomps(inst(PatternName::Cons, GridKind::Full, 1), whole);
  REQUIRE(d1.size() == 1);
  CHECK(d1[0][0] == seq_v(1, {int_v(0), int_v(3)}));
  CHECK(d1[0][1] == seq_v(2, {seq_v(1, {int_v(1), int_v(2)}),
                              seq_v(1, {int_v(4), int_v(5)})}));
  auto back = compose(inst(PatternName::Cons, GridKind::Full, 1), no_env, d1[0]);
  REQUIRE(back.has_value());
  CHECK(*back == whole);
}

TEST_CASE("Crop enumerates every occurrence") {
  Grid big = make_grid(GridKind::Full, {{1, 2, 3}, {3, 1, 2}, {5, 5, 5}});
  Grid sub = make_grid(GridKind::Full, {{1, 2}});
  Environment env;
  env.bind(7, Value(big));
  auto p = inst(PatternName::Crop);
  p.dep_param = Expression::var(7);

  // brute-force oracle over every position
  int expected = 0;
  for (int i = 0; i + 1 <= 3; ++i)
    for (int j = 0; j + 2 <= 3; ++j) {
      auto c = crop(big, i, j, 1, 2);
      if (c && *c == sub) ++expected;
    }
  auto ds = all_decomps(p, Value(sub), env);
  CHECK(static_cast<int>(ds.size()) == expected);
  CHECK(expected == 2);
  for (const auto& t : ds) {
    auto back = compose(p, env, t);
    REQUIRE(back.has_value());
    CHECK(back->as_grid() == sub);
  }
}

TEST_CASE("Segment length bound matches the part distribution") {
  Distribution V{GridDist::mask()};
  auto p = inst(PatternName::Segment, GridKind::Mask);
  Distribution len = part_distribution(p, 0, V, {});
  auto* d = len.get<IntDist>();
  REQUIRE(d != nullptr);
  CHECK(d->lo == 1);
  CHECK(d->hi == 60);  // max over both axes of a 30x30 box
}

TEST_CASE("BgColor part distributions follow the catalog grammar") {
  Distribution V{GridDist::full_grid()};
  auto p = inst(PatternName::BgColor);
  Distribution c = part_distribution(p, 0, V, {});
  auto* cd = c.get<ColorDist>();
  REQUIRE(cd != nullptr);
  CHECK(cd->bias == ColorDist::Bias::Background);
  Distribution s = part_distribution(p, 1, V, {color_v(kBlack)});
  auto* gd = s.get<GridDist>();
  REQUIRE(gd != nullptr);
  CHECK(gd->kind == GridKind::Sprite);
  CHECK(gd->excluded == kBlack);
}

TEST_CASE("Cons tail keeps the item distribution with one fewer item") {
  SeqDist sd;
  sd.depth = 1;
  sd.item = Distribution::make(IntDist::uniform(0, 5));
  sd.shape = SeqShape{4, {}};
  Distribution V{sd};
  auto p = inst(PatternName::Cons, GridKind::Full, 0);
  Distribution tail = part_distribution(p, 1, V, {});
  auto* td = tail.get<SeqDist>();
  REQUIRE(td != nullptr);
  CHECK(td->depth == 1);
  REQUIRE(td->shape.has_value());
  CHECK(td->shape->len == 3);
  CHECK(td->item->get<IntDist>() != nullptr);
}

TEST_CASE("Metagrid round-trips a separated grid") {
  Grid g = make_grid(GridKind::Full, {{1, 1, 2, 3, 3},
                                      {1, 1, 2, 3, 3},
                                      {2, 2, 2, 2, 2},
                                      {4, 4, 2, 5, 5}});
  auto p = inst(PatternName::Metagrid);
  auto ds = all_decomps(p, Value(g));
  REQUIRE(!ds.empty());
  bool found = false;
  for (const auto& t : ds) {
    auto back = compose(p, no_env, t);
    REQUIRE(back.has_value());
    CHECK(back->as_grid() == g);
    if (t[0] == color_v(2)) {
      found = true;
      CHECK(t[2] == vec_v(2, 2));  // 2x2 metagrid
    }
  }
  CHECK(found);
}

TEST_CASE("Motif: symmetric grid decomposes with empty noise") {
  Grid g = make_grid(GridKind::Full, {{1, 2, 1}, {3, 4, 3}, {1, 2, 1}});
  auto p = inst(PatternName::MotifP);
  auto ds = all_decomps(p, Value(g));
  REQUIRE(!ds.empty());
  bool saw_sym = false;
  for (const auto& t : ds) {
    auto back = compose(p, no_env, t);
    REQUIRE(back.has_value());
    CHECK(back->as_grid() == g);
    if (t[0].as_motif().family == Motif::Family::Symmetry &&
        count_nontransparent(t[3].as_grid()) == 0)
      saw_sym = true;
  }
  CHECK(saw_sym);
}

TEST_CASE("Motif: periodic grid compresses to its core") {
  Grid g = make_grid(GridKind::Full, {{1, 2, 1, 2}, {1, 2, 1, 2}});
  auto p = inst(PatternName::MotifP);
  auto ds = all_decomps(p, Value(g));
  REQUIRE(!ds.empty());
  // smallest periodic core comes first
  CHECK(ds[0][0].as_motif().family == Motif::Family::Periodic);
  CHECK(ds[0][1].as_grid() == make_grid(GridKind::Full, {{1, 2}}));
}

TEST_CASE("lifted Monocolor works item-wise with aligned shapes") {
  Grid a = make_grid(GridKind::Sprite, {{1, T}});
  Grid b = make_grid(GridKind::Sprite, {{2, 2}});
  Value whole = seq_v(1, {Value(a), Value(b)});
  auto p = inst(PatternName::Monocolor, GridKind::Sprite, 0, 1);
  auto ds = all_decomps(p, whole);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0][0] == seq_v(1, {color_v(1), color_v(2)}));
  REQUIRE(ds[0][1].depth() == 1);
  auto back = compose(p, no_env, ds[0]);
  REQUIRE(back.has_value());
  CHECK(*back == whole);

  // item-wise decomposition equals per-item decomposition with aligned shapes
  auto da = all_decomps(inst(PatternName::Monocolor, GridKind::Sprite), Value(a));
  auto db = all_decomps(inst(PatternName::Monocolor, GridKind::Sprite), Value(b));
  REQUIRE(da.size() == 1);
  REQUIRE(db.size() == 1);
  CHECK(ds[0][0].as_seq().get()[0] == da[0][0]);
  CHECK(ds[0][1].as_seq().get()[1] == db[0][1]);
}

TEST_CASE("lift depth two") {
  Grid a = make_grid(GridKind::Sprite, {{3}});
  Value whole = seq_v(2, {seq_v(1, {Value(a)}), seq_v(1, {Value(a), Value(a)})});
  auto p = inst(PatternName::Monocolor, GridKind::Sprite, 0, 2);
  auto ds = all_decomps(p, whole);
  REQUIRE(!ds.empty());
  auto back = compose(p, no_env, ds[0]);
  REQUIRE(back.has_value());
  CHECK(*back == whole);
}

TEST_CASE("arity violations are contract errors, incompatibility is undefined") {
  CHECK_THROWS_AS(compose(inst(PatternName::Vec), no_env, {int_v(1)}), std::invalid_argument);
  // Metagrid with inconsistent subgrid sizes is undefined, not an error
  auto p = inst(PatternName::Metagrid);
  Grid borders(GridKind::Mask, 2, 2, T);
  Grid sub1 = make_grid(GridKind::Full, {{1}});
  Grid sub2 = make_grid(GridKind::Full, {{2, 2}});  // width mismatch
  auto v = compose(p, no_env,
                   {color_v(5), Value(borders), vec_v(1, 2),
                    seq_v(1, {int_v(1)}), seq_v(1, {int_v(1), int_v(1)}),
                    seq_v(2, {seq_v(1, {Value(sub1), Value(sub2)})})});
  CHECK(!v.has_value());
}

// Randomized round-trip property: compose(decompose(v)) == v. Small-scale
// version; the acceptance suite runs the full catalog at 1000 values each.
TEST_CASE("decompose/compose round-trip on random grids") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> side(1, 6), color(0, 9), coin(0, 1);
  for (int iter = 0; iter < 300; ++iter) {
    int h = side(rng), w = side(rng);
    Grid g(GridKind::Full, h, w, 0);
    for (auto& c : g.cells) c = static_cast<std::uint8_t>(color(rng) % (coin(rng) ? 3 : 10));
    Value v{g};
    for (auto name : {PatternName::BgColor, PatternName::Monocolor, PatternName::MotifP,
                      PatternName::Metagrid, PatternName::ColorMat}) {
      auto p = inst(name, GridKind::Full);
      for (auto& t : all_decomps(p, v, no_env, 40)) {
        auto back = compose(p, no_env, t);
        REQUIRE(back.has_value());
        CHECK(*back == v);
      }
    }
  }
}

TEST_CASE("part values lie in the support of their part distribution") {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> side(1, 5), color(0, 3);
  Distribution V{GridDist::full_grid()};
  for (int iter = 0; iter < 200; ++iter) {
    Grid g(GridKind::Full, side(rng), side(rng), 0);
    for (auto& c : g.cells) c = static_cast<std::uint8_t>(color(rng));
    Value v{g};
    for (auto name : {PatternName::BgColor, PatternName::Monocolor, PatternName::MotifP}) {
      auto p = inst(name, GridKind::Full);
      for (auto& t : all_decomps(p, v, no_env, 10)) {
        std::vector<Value> prior;
        for (size_t i = 0; i < t.size(); ++i) {
          Distribution Vi = part_distribution(p, static_cast<int>(i), V, prior);
          CAPTURE(pattern_name(p.id));
          CAPTURE(i);
          CHECK(Vi.dl(t[i]).has_value());
          prior.push_back(t[i]);
        }
      }
    }
  }
}

TEST_CASE("compose is deterministic") {
  Grid sprite = make_grid(GridKind::Sprite, {{4, T}, {4, 4}});
  std::vector<Value> parts{color_v(3), Value(sprite)};
  auto a = compose(inst(PatternName::BgColor), no_env, parts);
  auto b = compose(inst(PatternName::BgColor), no_env, parts);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(*a == *b);
}
