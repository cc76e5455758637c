#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "madil/distribution.hpp"
#include "madil/values.hpp"

using namespace madil;

namespace {

// Random values for order-property checks.
Value random_value(std::mt19937& rng) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> small(0, 9);
  switch (kind(rng)) {
    case 0: return int_v(small(rng) - 5);
    case 1: return color_v(static_cast<std::uint8_t>(small(rng)));
    case 2: return vec_v(small(rng) - 3, small(rng) - 3);
    case 3: {
      int h = 1 + small(rng) % 3, w = 1 + small(rng) % 3;
      Grid g(GridKind::Full, h, w, 0);
      for (auto& c : g.cells) c = static_cast<std::uint8_t>(small(rng));
      return Value(std::move(g));
    }
    case 4: {
      std::vector<Value> items;
      int n = small(rng) % 3;
      for (int k = 0; k < n; ++k) items.push_back(int_v(small(rng)));
      return seq_v(1, std::move(items));
    }
    default: {
      ColorMap m;
      m.to[small(rng)] = static_cast<std::uint8_t>(small(rng));
      return Value(m);
    }
  }
}

}  // namespace

TEST_CASE("elias code length formula") {
  CHECK(elias_dl(1) == doctest::Approx(1.0));
  CHECK(elias_dl(2) == doctest::Approx(3.0));
  CHECK(elias_dl(8) == doctest::Approx(7.0));
  CHECK_THROWS_AS(elias_dl(0), std::domain_error);
  CHECK_THROWS_AS(elias_dl(-3), std::domain_error);
}

TEST_CASE("a-priori grid description length") {
  Grid g = make_grid(GridKind::Full, {{1, 2}, {3, 4}});
  Distribution V{GridDist::full_grid()};
  double expected = 3.0 + 3.0 + 4.0 * std::log2(10.0);
  CHECK(value_dl(Value(g), V) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected == doctest::Approx(19.2877).epsilon(1e-4));
}

TEST_CASE("uniform color list") {
  Distribution V{ColorDist::uniform_all()};
  CHECK(value_dl(color_v(3), V) == doctest::Approx(std::log2(10.0)));
}

TEST_CASE("sequence DL is the sum of item DLs") {
  Distribution item{ColorDist::uniform_all()};
  SeqDist sd;
  sd.depth = 1;
  sd.item = Distribution::make(ColorDist::uniform_all());
  Distribution V{sd};
  Value s = seq_v(1, {color_v(2), color_v(2), color_v(2)});
  CHECK(value_dl(s, V) == doctest::Approx(3.0 * std::log2(10.0)));

  // additivity on a random ragged 2-D sequence
  SeqDist sd2;
  sd2.depth = 2;
  sd2.item = Distribution::make(ColorDist::uniform_all());
  Distribution V2{sd2};
  Value row1 = seq_v(1, {color_v(1)});
  Value row2 = seq_v(1, {color_v(2), color_v(3), color_v(4)});
  Value mat = seq_v(2, {row1, row2});
  CHECK(value_dl(mat, V2) == doctest::Approx(4.0 * std::log2(10.0)));
}

TEST_CASE("background and object color biases are admissible and exact") {
  Distribution bg{ColorDist::background()};
  CHECK(value_dl(color_v(kBlack), bg) == doctest::Approx(1.0));
  CHECK(value_dl(color_v(5), bg) == doctest::Approx(std::log2(18.0)));
  Distribution obj{ColorDist::object()};
  CHECK(value_dl(color_v(kBlack), obj) == doctest::Approx(5.0));

  double mass = 0;
  for (int c = 0; c < kNumColors; ++c) mass += std::exp2(-value_dl(color_v(c), bg));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  mass = 0;
  for (int c = 0; c < kNumColors; ++c) mass += std::exp2(-value_dl(color_v(c), obj));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lossless-code admissibility on small enumerable supports") {
  std::vector<Distribution> dists;
  dists.push_back(Distribution{IntDist::uniform(-2, 7)});
  dists.push_back(Distribution{ColorDist::background()});
  dists.push_back(Distribution{ColorDist::object()});
  dists.push_back(Distribution{VecDist{IntDist::uniform(0, 3), IntDist::uniform(1, 2)}});
  dists.push_back(Distribution{GridDist::mask(IntDist::uniform(1, 2), IntDist::uniform(1, 2))});
  {
    GridDist sparse = GridDist::mask(IntDist::uniform(2, 2), IntDist::uniform(2, 2));
    sparse.content = GridDist::Content::Sparse;
    dists.push_back(Distribution{sparse});
  }
  {
    GridDist forced = GridDist::mask(IntDist::uniform(1, 3), IntDist::uniform(1, 3));
    forced.content = GridDist::Content::ForcedFull;
    dists.push_back(Distribution{forced});
  }
  dists.push_back(Distribution{SingletonDist{vec_v(3, 4)}});
  for (const auto& V : dists) {
    CAPTURE(V.klass().str());
    double mass = 0;
    size_t n = 0;
    auto s = V.enumerate();
    while (auto v = s.next()) {
      auto bits = V.dl(*v);
      REQUIRE(bits.has_value());
      CHECK(*bits >= 0.0);
      mass += std::exp2(-*bits);
      ++n;
      REQUIRE(n < 100000);  // the chosen supports are small
    }
    CHECK(mass <= 1.0 + 1e-9);
    CHECK(n > 0);
  }
}

TEST_CASE("enumeration is ascending in (dl, total order)") {
  std::vector<Distribution> dists;
  dists.push_back(Distribution{IntDist::elias(1, 40)});
  dists.push_back(Distribution{ColorDist::background()});
  dists.push_back(Distribution{GridDist::mask(IntDist::uniform(1, 2), IntDist::uniform(1, 2))});
  for (const auto& V : dists) {
    auto s = V.enumerate();
    std::optional<Value> prev;
    double prev_dl = -1;
    size_t count = 0;
    while (auto v = s.next()) {
      double bits = *V.dl(*v);
      if (prev) {
        CHECK(bits >= prev_dl - 1e-9);
        if (std::abs(bits - prev_dl) < 1e-9) CHECK(compare(*prev, *v) < 0);
      }
      prev = *v;
      prev_dl = bits;
      if (++count > 2000) break;
    }
  }
}

TEST_CASE("compare is a strict total order") {
  std::mt19937 rng(7);
  std::vector<Value> vs;
  for (int k = 0; k < 200; ++k) vs.push_back(random_value(rng));
  for (int iter = 0; iter < 3000; ++iter) {
    const Value& a = vs[rng() % vs.size()];
    const Value& b = vs[rng() % vs.size()];
    const Value& c = vs[rng() % vs.size()];
    CHECK(compare(a, a) == 0);
    // antisymmetry
    CHECK(compare(a, b) == -compare(b, a));
    // transitivity
    if (compare(a, b) <= 0 && compare(b, c) <= 0) CHECK(compare(a, c) <= 0);
  }
  CHECK(compare(color_v(1), color_v(2)) < 0);
  Grid g1(GridKind::Full, 1, 1, 0);
  Grid g2(GridKind::Full, 2, 2, 0);
  CHECK(compare(Value(g1), Value(g2)) < 0);
}

TEST_CASE("values outside the support are reported, not zero") {
  Distribution V{ColorDist{{1, 2, 3}, ColorDist::Bias::Uniform}};
  CHECK(!V.dl(color_v(5)).has_value());
  CHECK_THROWS_AS(value_dl(color_v(5), V), UndefinedValueError);
  CHECK_THROWS_AS(value_dl(int_v(1), V), UndefinedValueError);
}

TEST_CASE("grid invariants") {
  Grid full = make_grid(GridKind::Full, {{0, 1}, {2, 3}});
  CHECK(full.valid());
  Grid holed = make_grid(GridKind::Full, {{0, static_cast<int>(kTransparent)}});
  CHECK(!holed.valid());
  Grid mask = make_grid(GridKind::Mask, {{0, static_cast<int>(kTransparent)}});
  CHECK(mask.valid());
  Grid bad_mask = make_grid(GridKind::Mask, {{3}});
  CHECK(!bad_mask.valid());
}
