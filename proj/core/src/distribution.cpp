#include "madil/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace madil {

namespace {
constexpr std::int64_t kUnbounded = std::int64_t{1} << 40;
const double kLog10 = std::log2(10.0);
}  // namespace

std::optional<SeqShape> shape_of(const Value& v) {
  if (!v.is_seq()) return std::nullopt;
  const Seq& s = v.as_seq();
  SeqShape sh;
  sh.len = static_cast<int>(s.len());
  if (s.depth > 1) {
    for (const Value& x : s.get()) {
      auto k = shape_of(x);
      if (!k) return std::nullopt;
      sh.kids.push_back(std::move(*k));
    }
  }
  return sh;
}

bool DistClass::operator<(const DistClass& o) const {
  auto key = [](const DistClass& d) {
    return std::tuple(static_cast<int>(d.tag), static_cast<int>(d.kind), d.depth,
                      static_cast<int>(d.item_tag), static_cast<int>(d.item_kind));
  };
  return key(*this) < key(o);
}

std::string DistClass::str() const {
  std::ostringstream os;
  for (int k = 0; k < depth; ++k) os << '[';
  Tag t = depth > 0 ? item_tag : tag;
  GridKind gk = depth > 0 ? item_kind : kind;
  os << tag_name(t);
  if (t == Tag::Grid) os << ':' << grid_kind_name(gk);
  for (int k = 0; k < depth; ++k) os << ']';
  return os.str();
}

DistClass DistClass::item() const {
  DistClass d = *this;
  if (depth <= 0) return d;
  d.depth -= 1;
  if (d.depth == 0) {
    d.tag = item_tag;
    d.kind = item_kind;
  }
  return d;
}

DistClass DistClass::lifted(int layers) const {
  if (layers <= 0) return *this;
  DistClass d;
  d.tag = Tag::Seq;
  d.depth = depth + layers;
  d.item_tag = depth > 0 ? item_tag : tag;
  d.item_kind = depth > 0 ? item_kind : kind;
  return d;
}

DistClass DistClass::scalar(Tag t, GridKind k) {
  DistClass d;
  d.tag = t;
  d.kind = k;
  return d;
}

DistClass DistClass::of(const Value& v) {
  if (!v.is_seq()) {
    GridKind k = GridKind::Full;
    if (v.is_grid()) k = v.as_grid().kind;
    if (v.is_obj()) k = GridKind::Full;
    return scalar(v.tag(), k);
  }
  const Seq& s = v.as_seq();
  // Find a leaf to determine the item class; empty sequences default to Int.
  const Value* leaf = nullptr;
  const Value* cur = &v;
  while (cur && cur->is_seq()) {
    const auto& xs = cur->as_seq().get();
    cur = xs.empty() ? nullptr : &xs[0];
  }
  leaf = cur;
  DistClass item = leaf ? of(*leaf) : scalar(Tag::Int);
  return item.lifted(s.depth);
}

// --- Parameter struct helpers ---------------------------------------------

IntDist IntDist::uniform(std::int64_t lo, std::int64_t hi) {
  IntDist d;
  d.coding = Coding::Uniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

IntDist IntDist::elias(std::int64_t lo, std::int64_t hi) {
  IntDist d;
  d.coding = Coding::EliasPositive;
  d.lo = std::max<std::int64_t>(1, lo);
  d.hi = hi;
  return d;
}

IntDist IntDist::any() {
  IntDist d;
  d.coding = Coding::EliasSigned;
  d.lo = -kUnbounded;
  d.hi = kUnbounded;
  return d;
}

ColorDist ColorDist::uniform_all() {
  ColorDist d;
  for (std::uint8_t c = 0; c < kNumColors; ++c) d.allowed.push_back(c);
  return d;
}

ColorDist ColorDist::background() {
  ColorDist d = uniform_all();
  d.bias = Bias::Background;
  return d;
}

ColorDist ColorDist::object() {
  ColorDist d = uniform_all();
  d.bias = Bias::Object;
  return d;
}

int GridDist::cell_states() const {
  int base = kind == GridKind::Full ? 10 : kind == GridKind::Sprite ? 11 : 2;
  if (excluded && kind != GridKind::Mask) base -= 1;
  return base;
}

GridDist GridDist::full_grid() {
  GridDist d;
  d.kind = GridKind::Full;
  return d;
}

GridDist GridDist::sprite(IntDist hd, IntDist wd) {
  GridDist d;
  d.kind = GridKind::Sprite;
  d.hd = hd;
  d.wd = wd;
  return d;
}

GridDist GridDist::mask(IntDist hd, IntDist wd) {
  GridDist d;
  d.kind = GridKind::Mask;
  d.hd = hd;
  d.wd = wd;
  return d;
}

// --- dl --------------------------------------------------------------------

namespace {

std::optional<double> int_dl(const IntDist& d, std::int64_t n) {
  if (n < d.lo || n > d.hi) return std::nullopt;
  switch (d.coding) {
    case IntDist::Coding::Uniform:
      return std::log2(static_cast<double>(d.hi - d.lo + 1));
    case IntDist::Coding::EliasPositive:
      if (n < 1) return std::nullopt;
      return elias_dl(n);
    case IntDist::Coding::EliasSigned:
      return 1.0 + elias_dl(std::llabs(n) + 1);
  }
  return std::nullopt;
}

std::optional<double> color_dl(const ColorDist& d, std::uint8_t c) {
  auto it = std::find(d.allowed.begin(), d.allowed.end(), c);
  if (it == d.allowed.end()) return std::nullopt;
  size_t n = d.allowed.size();
  if (n == 1) return 0.0;
  bool has_black = std::find(d.allowed.begin(), d.allowed.end(), kBlack) != d.allowed.end();
  switch (d.bias) {
    case ColorDist::Bias::Uniform:
      break;
    case ColorDist::Bias::Background:
      if (!has_black) break;
      // black: 1/2, rest uniform over the others
      if (c == kBlack) return 1.0;
      return std::log2(2.0 * (n - 1));
    case ColorDist::Bias::Object:
      if (!has_black) break;
      // black: 1/32, rest uniform over the others
      if (c == kBlack) return 5.0;
      return std::log2(32.0 * (n - 1) / 31.0);
  }
  return std::log2(static_cast<double>(n));
}

std::optional<double> grid_dl(const GridDist& d, const Grid& g) {
  if (g.kind != d.kind || !g.valid()) return std::nullopt;
  auto hdl = int_dl(d.hd, g.h);
  auto wdl = int_dl(d.wd, g.w);
  if (!hdl || !wdl) return std::nullopt;
  double bits = *hdl + *wdl;
  switch (d.content) {
    case GridDist::Content::Free: {
      double per_cell = std::log2(static_cast<double>(d.cell_states()));
      for (auto c : g.cells)
        if (d.excluded && c == *d.excluded) return std::nullopt;
      bits += static_cast<double>(g.area()) * per_cell;
      return bits;
    }
    case GridDist::Content::ForcedFull: {
      for (auto c : g.cells)
        if (c == kTransparent) return std::nullopt;
      if (d.kind != GridKind::Mask) return std::nullopt;
      return bits;  // all-black mask: content carries no information
    }
    case GridDist::Content::Sparse: {
      int n = 0;
      for (auto c : g.cells) {
        if (d.excluded && c == *d.excluded) return std::nullopt;
        n += (c != kTransparent);
      }
      if (d.kind == GridKind::Full) return std::nullopt;
      double color_bits = d.kind == GridKind::Mask ? 0.0 : kLog10;
      bits += elias_dl(n + 1) + n * (std::log2(static_cast<double>(g.area())) + color_bits);
      return bits;
    }
  }
  return std::nullopt;
}

double motif_dl_value(const Motif& m) {
  double bits = std::log2(3.0);  // family
  switch (m.family) {
    case Motif::Family::Symmetry:
      bits += 3.0 + 2.0;  // 8 groups + two sharing flags
      break;
    case Motif::Family::Periodic:
      bits += elias_dl(m.h) + elias_dl(m.w);
      break;
    case Motif::Family::Template:
      bits += std::log2(3.0) + elias_dl(m.h) + elias_dl(m.w);
      break;
  }
  return bits;
}

std::optional<double> motif_dl(const Motif& m) {
  if (m.family != Motif::Family::Symmetry) {
    if (m.h < 1 || m.w < 1 || m.h > kMaxSide || m.w > kMaxSide) return std::nullopt;
  }
  return motif_dl_value(m);
}

double colormap_dl(const ColorMap& m) {
  return kNumColors + m.domain_size() * kLog10;
}

}  // namespace

std::optional<double> Distribution::dl(const Value& v) const {
  return std::visit(
      [&](const auto& d) -> std::optional<double> {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, IntDist>) {
          if (!v.is_int()) return std::nullopt;
          return int_dl(d, v.as_int());
        } else if constexpr (std::is_same_v<D, ColorDist>) {
          if (!v.is_color()) return std::nullopt;
          return color_dl(d, v.as_color().code);
        } else if constexpr (std::is_same_v<D, VecDist>) {
          if (!v.is_vec()) return std::nullopt;
          auto a = int_dl(d.i, v.as_vec().i);
          auto b = int_dl(d.j, v.as_vec().j);
          if (!a || !b) return std::nullopt;
          return *a + *b;
        } else if constexpr (std::is_same_v<D, GridDist>) {
          if (!v.is_grid()) return std::nullopt;
          return grid_dl(d, v.as_grid());
        } else if constexpr (std::is_same_v<D, ObjDist>) {
          if (!v.is_obj()) return std::nullopt;
          const Obj& o = v.as_obj();
          auto a = int_dl(d.pos.i, o.pos.i);
          auto b = int_dl(d.pos.j, o.pos.j);
          auto c = grid_dl(d.sprite, o.sprite);
          if (!a || !b || !c) return std::nullopt;
          return *a + *b + *c;
        } else if constexpr (std::is_same_v<D, ColorMapDist>) {
          if (!v.is_colormap()) return std::nullopt;
          return colormap_dl(v.as_colormap());
        } else if constexpr (std::is_same_v<D, MotifDist>) {
          if (!v.is_motif()) return std::nullopt;
          return motif_dl(v.as_motif());
        } else if constexpr (std::is_same_v<D, SeqDist>) {
          if (v.depth() != d.depth) return std::nullopt;
          if (d.shape) {
            auto sh = shape_of(v);
            if (!sh) return std::nullopt;
            // Only the skeleton down to recorded kids is compared.
            std::function<bool(const SeqShape&, const SeqShape&)> match =
                [&](const SeqShape& want, const SeqShape& got) {
                  if (want.len != got.len) return false;
                  if (want.kids.empty()) return true;
                  if (got.kids.size() != want.kids.size()) return false;
                  for (size_t k = 0; k < want.kids.size(); ++k)
                    if (!match(want.kids[k], got.kids[k])) return false;
                  return true;
                };
            if (!match(*d.shape, *sh)) return std::nullopt;
          }
          // Sum of leaf description lengths; lengths are not encoded here.
          std::function<std::optional<double>(const Value&, int)> rec =
              [&](const Value& x, int depth) -> std::optional<double> {
            if (depth == 0) return d.item->dl(x);
            if (x.depth() != depth) return std::nullopt;
            double total = 0;
            for (const Value& y : x.as_seq().get()) {
              auto b = rec(y, depth - 1);
              if (!b) return std::nullopt;
              total += *b;
            }
            return total;
          };
          return rec(v, d.depth);
        } else if constexpr (std::is_same_v<D, SingletonDist>) {
          if (compare(v, d.v) != 0) return std::nullopt;
          return 0.0;
        }
      },
      v_);
}

double value_dl(const Value& v, const Distribution& V) {
  auto b = V.dl(v);
  if (!b) throw UndefinedValueError("value_dl: value outside the support: " + to_string(v));
  return *b;
}

// --- enumerate ---------------------------------------------------------

namespace {

Stream<Value> enum_int(const IntDist& d) {
  switch (d.coding) {
    case IntDist::Coding::Uniform:
    case IntDist::Coding::EliasPositive: {
      auto cur = std::make_shared<std::int64_t>(d.lo);
      std::int64_t hi = d.hi;
      return Stream<Value>([cur, hi]() -> std::optional<Value> {
        if (*cur > hi) return std::nullopt;
        return int_v((*cur)++);
      });
    }
    case IntDist::Coding::EliasSigned: {
      // 0, -1, 1, -2, 2, ... (ascending dl, ties by total order)
      auto mag = std::make_shared<std::int64_t>(0);
      auto neg = std::make_shared<bool>(true);
      IntDist dd = d;
      return Stream<Value>([mag, neg, dd]() -> std::optional<Value> {
        for (;;) {
          std::int64_t n;
          if (*mag == 0) {
            n = 0;
            *mag = 1;
            *neg = true;
          } else if (*neg) {
            n = -*mag;
            *neg = false;
          } else {
            n = *mag;
            *neg = true;
            ++*mag;
          }
          if (*mag > kUnbounded) return std::nullopt;
          if (n >= dd.lo && n <= dd.hi) return int_v(n);
          if (-*mag < dd.lo && *mag > dd.hi) return std::nullopt;
        }
      });
    }
  }
  return Stream<Value>::empty();
}

Stream<Value> enum_color(const ColorDist& d) {
  std::vector<std::pair<double, std::uint8_t>> xs;
  for (auto c : d.allowed) xs.push_back({*color_dl(d, c), c});
  std::stable_sort(xs.begin(), xs.end());
  std::vector<Value> out;
  for (auto& [b, c] : xs) out.push_back(color_v(c));
  return Stream<Value>::of(std::move(out));
}

// Odometer over cell states for a fixed-size grid.
Stream<Value> enum_grid_cells(GridKind kind, int h, int w, std::vector<std::uint8_t> states) {
  auto digits = std::make_shared<std::vector<size_t>>(static_cast<size_t>(h) * w, 0);
  auto done = std::make_shared<bool>(false);
  return Stream<Value>([=]() -> std::optional<Value> {
    if (*done) return std::nullopt;
    Grid g(kind, h, w, 0);
    for (size_t k = 0; k < digits->size(); ++k) g.cells[k] = states[(*digits)[k]];
    // advance odometer (last cell fastest, lexicographic ascending)
    size_t k = digits->size();
    while (k > 0) {
      --k;
      if (++(*digits)[k] < states.size()) break;
      (*digits)[k] = 0;
      if (k == 0) *done = true;
    }
    if (digits->size() == 0) *done = true;
    return Value(std::move(g));
  });
}

// Sparse content: count layers, positions as ascending index lists.
Stream<Value> enum_grid_sparse(const GridDist& d, int h, int w) {
  struct State {
    int n = 0;                    // current non-transparent count
    std::vector<int> pos;         // ascending cell indices, size n
    std::vector<size_t> col;      // color odometer, size n
    bool layer_init = false;
  };
  auto st = std::make_shared<State>();
  GridKind kind = d.kind;
  int area = h * w;
  std::vector<std::uint8_t> colors;
  if (kind == GridKind::Mask)
    colors = {kBlack};
  else
    for (std::uint8_t c = 0; c < kNumColors; ++c)
      if (!d.excluded || c != *d.excluded) colors.push_back(c);

  return Stream<Value>([st, kind, h, w, area, colors]() -> std::optional<Value> {
    for (;;) {
      if (st->n > area) return std::nullopt;
      if (!st->layer_init) {
        st->pos.resize(st->n);
        for (int k = 0; k < st->n; ++k) st->pos[k] = k;
        st->col.assign(st->n, 0);
        st->layer_init = true;
      }
      Grid g(kind, h, w, kTransparent);
      for (int k = 0; k < st->n; ++k)
        g.cells[st->pos[k]] = colors[st->col[k]];
      // advance: colors odometer, then next position combination
      bool advanced = false;
      for (int k = st->n - 1; k >= 0; --k) {
        if (++st->col[k] < colors.size()) { advanced = true; break; }
        st->col[k] = 0;
      }
      if (!advanced) {
        // next combination of positions (lexicographic)
        int k = st->n - 1;
        while (k >= 0 && st->pos[k] == area - (st->n - k)) --k;
        if (k < 0) {
          ++st->n;
          st->layer_init = false;
        } else {
          ++st->pos[k];
          for (int m = k + 1; m < st->n; ++m) st->pos[m] = st->pos[m - 1] + 1;
          st->col.assign(st->n, 0);
        }
      }
      return Value(std::move(g));
    }
  });
}

Stream<Value> enum_grid(const GridDist& d) {
  // Collect candidate sizes with their total first-item dl, merge ascending.
  std::vector<std::pair<double, std::pair<int, int>>> sizes;
  for (std::int64_t h = std::max<std::int64_t>(1, d.hd.lo);
       h <= std::min<std::int64_t>(kMaxSide, d.hd.hi); ++h) {
    for (std::int64_t w = std::max<std::int64_t>(1, d.wd.lo);
         w <= std::min<std::int64_t>(kMaxSide, d.wd.hi); ++w) {
      auto hb = int_dl(d.hd, h);
      auto wb = int_dl(d.wd, w);
      if (!hb || !wb) continue;
      double content = 0;
      switch (d.content) {
        case GridDist::Content::Free:
          content = h * w * std::log2(static_cast<double>(d.cell_states()));
          break;
        case GridDist::Content::ForcedFull:
          content = 0;
          break;
        case GridDist::Content::Sparse:
          content = elias_dl(1);  // first layer: empty
          break;
      }
      sizes.push_back({*hb + *wb + content, {static_cast<int>(h), static_cast<int>(w)}});
    }
  }
  std::stable_sort(sizes.begin(), sizes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Stream<Value>> per_size;
  for (auto& [bits, hw] : sizes) {
    auto [h, w] = hw;
    switch (d.content) {
      case GridDist::Content::Free: {
        std::vector<std::uint8_t> states;
        if (d.kind == GridKind::Mask) {
          states = {kBlack, kTransparent};
        } else {
          for (std::uint8_t c = 0; c < kNumColors; ++c)
            if (!d.excluded || c != *d.excluded) states.push_back(c);
          if (d.kind == GridKind::Sprite) states.push_back(kTransparent);
        }
        per_size.push_back(enum_grid_cells(d.kind, h, w, std::move(states)));
        break;
      }
      case GridDist::Content::ForcedFull:
        per_size.push_back(Stream<Value>::single(Value(Grid(GridKind::Mask, h, w, kBlack))));
        break;
      case GridDist::Content::Sparse:
        per_size.push_back(enum_grid_sparse(d, h, w));
        break;
    }
  }
  GridDist dd = d;
  return merge_by_key<Value>(std::move(per_size),
                             [dd](const Value& v) { return *grid_dl(dd, v.as_grid()); });
}

Stream<Value> enum_motifs() {
  std::vector<Value> all;
  for (int g = 0; g < 8; ++g)
    for (int si = 0; si < 2; ++si)
      for (int sj = 0; sj < 2; ++sj)
        all.push_back(Value(Motif::symmetry(static_cast<Motif::SymGroup>(g), si, sj)));
  for (int h = 1; h <= kMaxSide; ++h)
    for (int w = 1; w <= kMaxSide; ++w) {
      all.push_back(Value(Motif::periodic(h, w)));
      for (auto s : {Motif::Shape::Rectangle, Motif::Shape::Cross, Motif::Shape::Border})
        all.push_back(Value(Motif::templ(s, h, w)));
    }
  std::sort(all.begin(), all.end(), [](const Value& a, const Value& b) {
    double da = motif_dl_value(a.as_motif()), db = motif_dl_value(b.as_motif());
    if (da != db) return da < db;
    return compare(a, b) < 0;
  });
  return Stream<Value>::of(std::move(all));
}

Stream<Value> enum_colormaps() {
  // Layered by domain size (dl ascending); assignments in odometer order.
  struct State {
    int dsize = 0;
    std::vector<int> dom;
    std::vector<size_t> img;
    bool init = false;
  };
  auto st = std::make_shared<State>();
  return Stream<Value>([st]() -> std::optional<Value> {
    if (st->dsize > kNumColors) return std::nullopt;
    if (!st->init) {
      st->dom.resize(st->dsize);
      for (int k = 0; k < st->dsize; ++k) st->dom[k] = k;
      st->img.assign(st->dsize, 0);
      st->init = true;
    }
    ColorMap m;
    for (int k = 0; k < st->dsize; ++k)
      m.to[st->dom[k]] = static_cast<std::uint8_t>(st->img[k]);
    // advance
    bool adv = false;
    for (int k = st->dsize - 1; k >= 0; --k) {
      if (++st->img[k] < kNumColors) { adv = true; break; }
      st->img[k] = 0;
    }
    if (!adv) {
      int k = st->dsize - 1;
      while (k >= 0 && st->dom[k] == kNumColors - (st->dsize - k)) --k;
      if (k < 0) {
        ++st->dsize;
        st->init = false;
      } else {
        ++st->dom[k];
        for (int t = k + 1; t < st->dsize; ++t) st->dom[t] = st->dom[t - 1] + 1;
        st->img.assign(st->dsize, 0);
      }
    }
    return Value(m);
  });
}

}  // namespace

namespace {

using Costed = std::pair<Value, double>;

// Pairs each enumerated value with its dl under the distribution.
Stream<Costed> with_costs(const Distribution& dist) {
  auto d = std::make_shared<Distribution>(dist);
  auto src = std::make_shared<Stream<Value>>(d->enumerate());
  return Stream<Costed>([d, src]() -> std::optional<Costed> {
    if (auto v = src->next()) {
      auto b = d->dl(*v);
      return Costed{std::move(*v), b ? *b : 0.0};
    }
    return std::nullopt;
  });
}

Stream<std::pair<std::vector<Value>, double>> costed_product(
    std::vector<Distribution> comps) {
  std::vector<Memo<Costed>> memos;
  for (auto& c : comps) memos.emplace_back(with_costs(c));
  return std::move(sorted_product_stream<Costed>(
             std::move(memos), [](const Costed& c) { return c.second; }))
      .map([](std::pair<std::vector<Costed>, double> t) {
        std::vector<Value> vs;
        vs.reserve(t.first.size());
        for (auto& c : t.first) vs.push_back(std::move(c.first));
        return std::make_pair(std::move(vs), t.second);
      });
}

int leaf_count(const SeqShape& s, int depth) {
  if (depth <= 1) return s.len;
  int n = 0;
  for (const auto& k : s.kids) n += leaf_count(k, depth - 1);
  return n;
}

}  // namespace

Stream<Value> Distribution::enumerate() const {
  return std::visit(
      [this](const auto& d) -> Stream<Value> {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, IntDist>) {
          return enum_int(d);
        } else if constexpr (std::is_same_v<D, ColorDist>) {
          return enum_color(d);
        } else if constexpr (std::is_same_v<D, VecDist>) {
          return std::move(costed_product({Distribution{d.i}, Distribution{d.j}}))
              .map([](std::pair<std::vector<Value>, double> t) {
                return vec_v(t.first[0].as_int(), t.first[1].as_int());
              });
        } else if constexpr (std::is_same_v<D, GridDist>) {
          return enum_grid(d);
        } else if constexpr (std::is_same_v<D, ObjDist>) {
          return std::move(costed_product({Distribution{VecDist{d.pos}}, Distribution{d.sprite}}))
              .map([](std::pair<std::vector<Value>, double> t) {
                return Value(Obj{t.first[0].as_vec(), t.first[1].as_grid()});
              });
        } else if constexpr (std::is_same_v<D, ColorMapDist>) {
          return enum_colormaps();
        } else if constexpr (std::is_same_v<D, MotifDist>) {
          return enum_motifs();
        } else if constexpr (std::is_same_v<D, SeqDist>) {
          if (!d.shape) return Stream<Value>::empty();
          int leaves = leaf_count(*d.shape, d.depth);
          std::vector<Distribution> comps(static_cast<size_t>(leaves), *d.item);
          SeqShape shape = *d.shape;
          int depth = d.depth;
          if (leaves == 0) {
            // Only the empty skeleton exists.
            std::function<Value(const SeqShape&, int)> build =
                [&build](const SeqShape& s, int dep) -> Value {
              std::vector<Value> xs;
              if (dep > 1)
                for (int k = 0; k < s.len; ++k) xs.push_back(build(s.kids[k], dep - 1));
              return seq_v(dep, std::move(xs));
            };
            return Stream<Value>::single(build(shape, depth));
          }
          return std::move(costed_product(std::move(comps)))
              .map([shape, depth](std::pair<std::vector<Value>, double> t) {
                size_t pos = 0;
                std::function<Value(const SeqShape&, int)> build =
                    [&](const SeqShape& s, int dep) -> Value {
                  std::vector<Value> xs;
                  for (int k = 0; k < s.len; ++k) {
                    if (dep == 1)
                      xs.push_back(t.first[pos++]);
                    else
                      xs.push_back(build(s.kids[k], dep - 1));
                  }
                  return seq_v(dep, std::move(xs));
                };
                return build(shape, depth);
              });
        } else if constexpr (std::is_same_v<D, SingletonDist>) {
          return Stream<Value>::single(d.v);
        }
      },
      v_);
}

bool Distribution::finite_support() const {
  return std::visit(
      [](const auto& d) -> bool {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, IntDist>) {
          return d.hi - d.lo < kUnbounded;
        } else if constexpr (std::is_same_v<D, VecDist>) {
          return d.i.hi - d.i.lo < kUnbounded && d.j.hi - d.j.lo < kUnbounded;
        } else if constexpr (std::is_same_v<D, SeqDist>) {
          return d.shape.has_value() && d.item->finite_support();
        } else if constexpr (std::is_same_v<D, ObjDist>) {
          return d.pos.i.hi - d.pos.i.lo < kUnbounded && d.pos.j.hi - d.pos.j.lo < kUnbounded;
        } else {
          return true;
        }
      },
      v_);
}

DistClass Distribution::klass() const {
  return std::visit(
      [](const auto& d) -> DistClass {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, IntDist>) {
          return DistClass::scalar(Tag::Int);
        } else if constexpr (std::is_same_v<D, ColorDist>) {
          return DistClass::scalar(Tag::Color);
        } else if constexpr (std::is_same_v<D, VecDist>) {
          return DistClass::scalar(Tag::Vec);
        } else if constexpr (std::is_same_v<D, GridDist>) {
          return DistClass::scalar(Tag::Grid, d.kind);
        } else if constexpr (std::is_same_v<D, ObjDist>) {
          return DistClass::scalar(Tag::Obj);
        } else if constexpr (std::is_same_v<D, ColorMapDist>) {
          return DistClass::scalar(Tag::ColorMap);
        } else if constexpr (std::is_same_v<D, MotifDist>) {
          return DistClass::scalar(Tag::Motif);
        } else if constexpr (std::is_same_v<D, SeqDist>) {
          return d.item->klass().lifted(d.depth);
        } else {
          return DistClass::of(d.v);
        }
      },
      v_);
}

int Distribution::depth() const {
  if (auto* s = get<SeqDist>()) return s->depth;
  if (auto* s = get<SingletonDist>()) return s->v.depth();
  return 0;
}

DistPtr Distribution::make(Variant v) {
  auto p = std::make_shared<Distribution>();
  p->v_ = std::move(v);
  return p;
}

DistPtr lift_dist(DistPtr item, int layers, std::optional<SeqShape> shape) {
  if (layers <= 0) return item;
  SeqDist d;
  d.depth = layers + item->depth();
  if (auto* s = item->get<SeqDist>()) {
    d.item = s->item;
  } else {
    d.item = item;
  }
  d.shape = std::move(shape);
  return Distribution::make(std::move(d));
}

}  // namespace madil
