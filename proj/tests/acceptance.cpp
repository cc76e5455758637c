// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 iff no criterion
// fails (skipped data-dependent criteria exit with code 77 semantics noted
// in the line, but do not fail the suite).

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "madil/refinement.hpp"
#include "madil/search.hpp"
#include "madil/taskio.hpp"

using namespace madil;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n" << std::flush;
  if (!pass) ++g_failures;
}

void report_skip(const std::string& name, const std::string& detail) {
  std::cout << "[SKIP] " << name << ": " << detail << "\n" << std::flush;
}

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --- random value generators -----------------------------------------------

struct Gen {
  std::mt19937 rng{20240099};

  int irange(int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); }

  Grid grid(GridKind kind, int max_side = 6, int ncolors = 10) {
    int h = irange(1, max_side), w = irange(1, max_side);
    Grid g(kind, h, w, kTransparent);
    for (auto& c : g.cells) {
      switch (kind) {
        case GridKind::Full: c = static_cast<std::uint8_t>(irange(0, ncolors - 1)); break;
        case GridKind::Sprite:
          c = irange(0, 2) ? static_cast<std::uint8_t>(irange(0, ncolors - 1)) : kTransparent;
          break;
        case GridKind::Mask: c = irange(0, 1) ? kBlack : kTransparent; break;
      }
    }
    return g;
  }

  Grid monochrome_sprite(int max_side = 6) {
    Grid g = grid(GridKind::Sprite, max_side);
    std::uint8_t c = static_cast<std::uint8_t>(irange(0, 9));
    bool any = false;
    for (auto& x : g.cells)
      if (x != kTransparent) {
        x = c;
        any = true;
      }
    if (!any) g.cells[0] = c;
    return g;
  }

  Grid motif_grid() {
    // expand a random motif from a random core, then sprinkle noise
    for (;;) {
      Grid core = grid(irange(0, 1) ? GridKind::Full : GridKind::Sprite, 3);
      Motif m;
      switch (irange(0, 2)) {
        case 0:
          m = Motif::symmetry(static_cast<Motif::SymGroup>(irange(0, 7)), irange(0, 1),
                              irange(0, 1));
          break;
        case 1:
          m = Motif::periodic(core.h * irange(1, 3), core.w * irange(1, 3));
          break;
        default:
          core = Grid(GridKind::Sprite, 1, 1, static_cast<std::uint8_t>(irange(1, 9)));
          m = Motif::templ(static_cast<Motif::Shape>(irange(0, 2)), irange(2, 6), irange(2, 6));
          break;
      }
      auto g = expand_motif(m, core);
      if (!g) continue;
      if (irange(0, 3) == 0 && g->kind != GridKind::Mask) {
        int i = irange(0, g->h - 1), j = irange(0, g->w - 1);
        if (g->at(i, j) != kTransparent) g->at(i, j) = static_cast<std::uint8_t>(irange(0, 9));
      }
      return *g;
    }
  }

  Grid metagrid_grid(GridKind kind) {
    int k = irange(1, 2), l = irange(1, 2);
    if (k * l < 2) l = 2;
    std::uint8_t sep = kind == GridKind::Mask ? kBlack : static_cast<std::uint8_t>(irange(1, 9));
    std::vector<int> hs, ws;
    int H = k - 1, W = l - 1;
    for (int a = 0; a < k; ++a) { hs.push_back(irange(1, 3)); H += hs.back(); }
    for (int b = 0; b < l; ++b) { ws.push_back(irange(1, 3)); W += ws.back(); }
    Grid g(kind, H, W, sep);
    int i0 = 0;
    for (int a = 0; a < k; ++a) {
      int j0 = 0;
      for (int b = 0; b < l; ++b) {
        for (int i = 0; i < hs[a]; ++i)
          for (int j = 0; j < ws[b]; ++j) {
            std::uint8_t c;
            do {
              c = kind == GridKind::Mask
                      ? (irange(0, 1) ? kBlack : kTransparent)
                      : kind == GridKind::Full
                            ? static_cast<std::uint8_t>(irange(0, 9))
                            : (irange(0, 2) ? static_cast<std::uint8_t>(irange(0, 9))
                                            : kTransparent);
            } while (false);
            g.at(i0 + i, j0 + j) = c;
          }
        j0 += ws[b] + 1;
      }
      i0 += hs[a] + 1;
    }
    // the separator rows could be broken by equal-colored content; that is
    // fine, the pattern simply yields other candidates
    return g;
  }

  Value value_for(const PatternId& id) {
    switch (id.name) {
      case PatternName::BgColor: return Value(grid(GridKind::Full, 5, 3));
      case PatternName::Monocolor:
        if (id.kind == GridKind::Full)
          return Value(Grid(GridKind::Full, irange(1, 5), irange(1, 5),
                            static_cast<std::uint8_t>(irange(0, 9))));
        return Value(monochrome_sprite());
      case PatternName::MotifP: {
        Grid g = motif_grid();
        g.kind = id.kind;
        if (!g.valid()) {
          if (id.kind == GridKind::Mask) return Value(grid(GridKind::Mask, 4));
          if (id.kind == GridKind::Full) return Value(grid(GridKind::Full, 4));
        }
        return Value(g);
      }
      case PatternName::IsFull: {
        Grid g = grid(GridKind::Full, 5);
        g.kind = GridKind::Sprite;
        return Value(g);
      }
      case PatternName::Empty:
        return Value(Grid(id.kind, irange(1, 6), irange(1, 6), kTransparent));
      case PatternName::Full:
        return Value(Grid(GridKind::Mask, irange(1, 6), irange(1, 6), kBlack));
      case PatternName::Point:
        return Value(Grid(GridKind::Mask, 1, 1, kBlack));
      case PatternName::Segment: {
        static const Vec2 dirs[4] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
        const Vec2& dir = dirs[irange(0, 3)];
        int len = irange(1, 6);
        PatternInstance seg;
        seg.id.name = PatternName::Segment;
        seg.id.kind = GridKind::Mask;
        Environment env;
        auto v = compose(seg, env, {int_v(len), Value(dir)});
        return v ? *v : Value(Grid(GridKind::Mask, 1, 1, kBlack));
      }
      case PatternName::Vec: return vec_v(irange(-5, 5), irange(-5, 5));
      case PatternName::Square: {
        int s = irange(-4, 4);
        return vec_v(s, s);
      }
      case PatternName::Swap: {
        ColorMap m;
        int a = irange(0, 8);
        int b = irange(a + 1, 9);
        m.to[a] = static_cast<std::uint8_t>(b);
        m.to[b] = static_cast<std::uint8_t>(a);
        return Value(m);
      }
      case PatternName::Replace: {
        ColorMap m;
        int a = irange(0, 9), b = (a + irange(1, 9)) % 10;
        m.to[a] = static_cast<std::uint8_t>(b);
        return Value(m);
      }
      case PatternName::Objects: {
        Grid g(GridKind::Sprite, irange(2, 6), irange(2, 6), kTransparent);
        int blobs = irange(1, 3);
        for (int b = 0; b < blobs; ++b) {
          int i = irange(0, g.h - 1), j = irange(0, g.w - 1);
          g.at(i, j) = static_cast<std::uint8_t>(irange(1, 9));
        }
        return Value(g);
      }
      case PatternName::Metagrid: return Value(metagrid_grid(id.kind));
      case PatternName::ColorRow: return Value(grid_row());
      case PatternName::ColorCol: {
        Grid g = grid_row();
        return Value(transform(g, SymTransform::Transpose));
      }
      case PatternName::ColorMat: return Value(grid(GridKind::Full, 4));
      case PatternName::AsGrid: {
        Grid g = grid(GridKind::Full, 4);
        std::vector<Value> rows;
        for (int i = 0; i < g.h; ++i) {
          std::vector<Value> row;
          for (int j = 0; j < g.w; ++j) row.push_back(color_v(g.at(i, j)));
          rows.push_back(seq_v(1, std::move(row)));
        }
        return seq_v(2, std::move(rows));
      }
      case PatternName::DomainMap: {
        ColorMap m;
        for (auto c : id.color_set) m.to[c] = static_cast<std::uint8_t>(irange(0, 9));
        return Value(m);
      }
      case PatternName::Range: {
        int start = irange(-5, 5), step = irange(-3, 3), n = irange(2, 6);
        std::vector<Value> xs;
        for (int t = 0; t < n; ++t) xs.push_back(int_v(start + t * step));
        return seq_v(1, std::move(xs));
      }
      case PatternName::ObjP:
        return Value(Obj{Vec2{irange(0, 5), irange(0, 5)}, monochrome_sprite(3)});
      case PatternName::Cons: case PatternName::Repeat: {
        // ragged 2-D integer sequences with non-empty sub-sequences
        int rows = irange(1, 3);
        std::vector<Value> rs;
        int common = irange(-3, 3);
        for (int r = 0; r < rows; ++r) {
          int len = irange(1, 3);
          std::vector<Value> xs;
          for (int t = 0; t < len; ++t)
            xs.push_back(int_v(id.name == PatternName::Repeat && id.d == 1
                                   ? common + r
                                   : irange(-3, 3)));
          rs.push_back(seq_v(1, std::move(xs)));
        }
        return seq_v(2, std::move(rs));
      }
      case PatternName::Crop: return Value(grid(GridKind::Full, 3));
      case PatternName::Recoloring: return Value(grid(GridKind::Sprite, 4));
      case PatternName::Index: return int_v(irange(-3, 3));
    }
    return int_v(0);
  }

  Grid grid_row() {
    Grid g(GridKind::Full, 1, irange(1, 8), 0);
    for (auto& c : g.cells) c = static_cast<std::uint8_t>(irange(0, 9));
    return g;
  }
};

// --- criterion 1: pattern round-trips ---------------------------------------

void criterion_roundtrip() {
  auto t0 = Clock::now();
  Gen gen;
  long checked = 0, failures = 0;
  std::vector<PatternInstance> catalog;
  auto add = [&](PatternName n, GridKind k = GridKind::Full, int d = 0) {
    PatternInstance p;
    p.id.name = n;
    p.id.kind = k;
    p.id.d = d;
    catalog.push_back(p);
  };
  add(PatternName::BgColor);
  add(PatternName::Monocolor, GridKind::Full);
  add(PatternName::Monocolor, GridKind::Sprite);
  add(PatternName::MotifP, GridKind::Full);
  add(PatternName::MotifP, GridKind::Sprite);
  add(PatternName::MotifP, GridKind::Mask);
  add(PatternName::IsFull, GridKind::Sprite);
  add(PatternName::Empty, GridKind::Sprite);
  add(PatternName::Empty, GridKind::Mask);
  add(PatternName::Full, GridKind::Mask);
  add(PatternName::Point, GridKind::Mask);
  add(PatternName::Segment, GridKind::Mask);
  add(PatternName::Vec);
  add(PatternName::Square);
  add(PatternName::Swap);
  add(PatternName::Replace);
  add(PatternName::Objects, GridKind::Sprite);
  add(PatternName::Metagrid, GridKind::Full);
  add(PatternName::Metagrid, GridKind::Sprite);
  add(PatternName::Metagrid, GridKind::Mask);
  add(PatternName::ColorRow, GridKind::Full);
  add(PatternName::ColorCol, GridKind::Full);
  add(PatternName::ColorMat, GridKind::Full);
  add(PatternName::AsGrid);
  {
    PatternInstance dm;
    dm.id.name = PatternName::DomainMap;
    dm.id.color_set = {1, 4, 7};
    catalog.push_back(dm);
  }
  add(PatternName::Range);
  add(PatternName::ObjP);
  add(PatternName::Cons, GridKind::Full, 0);
  add(PatternName::Cons, GridKind::Full, 1);
  add(PatternName::Repeat, GridKind::Full, 0);
  add(PatternName::Repeat, GridKind::Full, 1);
  // dependent patterns with a bound parameter
  add(PatternName::Crop);
  add(PatternName::Recoloring, GridKind::Sprite);
  add(PatternName::Index, GridKind::Full, 1);

  for (PatternInstance p : catalog) {
    Environment env;
    if (p.dependent()) {
      p.dep_param = Expression::var(0);
    }
    for (int iter = 0; iter < 1000; ++iter) {
      Value v = gen.value_for(p.id);
      if (p.id.name == PatternName::Crop) {
        // embed v inside a larger parameter grid
        Grid big = gen.grid(GridKind::Full, 8);
        const Grid& sub = v.as_grid();
        if (big.h < sub.h || big.w < sub.w) continue;
        int i0 = gen.irange(0, big.h - sub.h), j0 = gen.irange(0, big.w - sub.w);
        big = overlay(big, sub, i0, j0);
        for (int i = 0; i < sub.h; ++i)
          for (int j = 0; j < sub.w; ++j) big.at(i0 + i, j0 + j) = sub.at(i, j);
        env.bind(0, Value(big));
      } else if (p.id.name == PatternName::Recoloring) {
        Grid base = v.as_grid();
        ColorMap m;
        m.to[gen.irange(0, 9)] = static_cast<std::uint8_t>(gen.irange(0, 9));
        Grid image = base;
        for (auto& c : image.cells)
          if (c != kTransparent) c = m.apply(c);
        env.bind(0, Value(base));
        v = Value(image);
      } else if (p.id.name == PatternName::Index) {
        std::vector<Value> xs;
        int n = gen.irange(1, 5);
        for (int t = 0; t < n; ++t) xs.push_back(int_v(gen.irange(-3, 3)));
        Value s = seq_v(1, std::move(xs));
        env.bind(0, s);
        v = s.as_seq().get()[static_cast<size_t>(gen.irange(0, n - 1))];
      }
      // shape context for patterns that need target lengths
      std::optional<Distribution> ctx;
      if (auto sh = shape_of(v)) {
        SeqDist sd;
        sd.depth = v.depth();
        sd.item = Distribution::make(IntDist::any());
        sd.shape = *sh;
        ctx = Distribution(sd);
      }
      auto tuples = decompose(p, env, v);
      int taken = 0;
      while (auto t = tuples.next()) {
        ++checked;
        auto back = compose(p, env, *t, ctx ? &*ctx : nullptr);
        if (!back || compare(*back, v) != 0) {
          ++failures;
          if (failures < 4)
            std::cout << "  roundtrip failure: " << pattern_name(p.id) << " on "
                      << to_string(v) << "\n";
        }
        if (++taken >= 20) break;
      }
    }
  }
  double secs = elapsed(t0);
  std::ostringstream os;
  os << checked << " decompositions checked, " << failures << " failures, "
     << secs << "s";
  report("pattern-round-trip", failures == 0 && secs < 60.0, os.str());
}

// --- criterion 2: counting oracle -------------------------------------------

const DistClass A = DistClass::scalar(Tag::Int);
const DistClass B = DistClass::scalar(Tag::Color);

class ToyGrammar : public Grammar {
 public:
  std::vector<PatternRule> pattern_rules(const DistClass& v) const override {
    if (v == A) return {{0, {A, B}}, {0, {B}}};
    if (v == B) return {{0, {A}}};
    return {};
  }
  std::vector<FunctionRule> function_rules(const DistClass& v) const override {
    if (v == A) return {{0, {A}}, {0, {B, B}}};
    if (v == B) return {{0, {A}}, {0, {B}}};
    return {};
  }
};

long enum_count(int n, const DistClass& c, const Grammar& g, bool models);

long enum_products_count(int total, const std::vector<DistClass>& parts, size_t i,
                         const Grammar& g, bool models) {
  if (i == parts.size()) return total == 0 ? 1 : 0;
  long out = 0;
  int rest = static_cast<int>(parts.size() - i - 1);
  for (int t = 1; t + rest <= total; ++t) {
    long heads = enum_count(t, parts[i], g, models);
    if (heads) out += heads * enum_products_count(total - t, parts, i + 1, g, models);
  }
  return out;
}

// Literal enumeration of abstract syntax trees (the counting oracle).
long enum_count(int n, const DistClass& c, const Grammar& g, bool models) {
  if (n < 1) return 0;
  if (n == 1) return models ? 3 : 2;
  long total = models ? enum_count(n, c, g, false) : 0;
  const auto add_rules = [&](auto rules) {
    for (const auto& r : rules) {
      auto parts = models ? r.parts : r.parts;
      total += enum_products_count(n - 1 - r.extra, parts, 0, g, models);
    }
  };
  if (models) {
    for (const auto& r : g.pattern_rules(c))
      total += enum_products_count(n - 1 - r.extra, r.parts, 0, g, true);
  } else {
    for (const auto& r : g.function_rules(c))
      total += enum_products_count(n - 1 - r.extra, r.args, 0, g, false);
  }
  return total;
}

void criterion_counting() {
  ToyGrammar g;
  CountingContext ctx(g);
  bool ok = true;
  std::ostringstream os;
  for (int n = 1; n <= 6 && ok; ++n) {
    for (const DistClass& c : {A, B}) {
      long em = enum_count(n, c, g, true);
      long ee = enum_count(n, c, g, false);
      if (ctx.count_models(n, c) != static_cast<double>(em) ||
          ctx.count_exprs(n, c) != static_cast<double>(ee)) {
        ok = false;
        os << "mismatch at n=" << n;
        break;
      }
    }
  }
  if (ok) os << "sizes 1..6 on the 3-pattern/4-function toy catalog, exact";
  report("counting-oracle", ok, os.str());
}

}  // namespace

// --- criterion 3: parse/generate duality -------------------------------

namespace {

void criterion_duality() {
  std::mt19937 rng(7);
  Environment base_env;
  base_env.bind(100, int_v(2));
  int checked_pairs = 0, mismatches = 0;
  for (int iter = 0; iter < 200; ++iter) {
    // finite-support distributions
    Distribution V = iter % 2 == 0
                         ? Distribution{GridDist::mask(IntDist::uniform(1, 2), IntDist::uniform(1, 2))}
                         : Distribution{VecDist{IntDist::uniform(0, 3), IntDist::uniform(0, 2)}};
    ModelPtr m;
    auto inst = [](PatternName n, GridKind k = GridKind::Full, int d = 0) {
      PatternInstance p;
      p.id.name = n;
      p.id.kind = k;
      p.id.d = d;
      return p;
    };
    switch (iter % 8) {
      case 0: m = ModelNode::unknown(0); break;
      case 1:
        m = iter % 2 ? ModelNode::pattern(0, inst(PatternName::Vec),
                                          {ModelNode::unknown(1), ModelNode::unknown(2)})
                     : ModelNode::pattern(0, inst(PatternName::Empty, GridKind::Mask),
                                          {ModelNode::unknown(1)});
        break;
      case 2:
        m = iter % 2 ? ModelNode::pattern(0, inst(PatternName::Square),
                                          {ModelNode::unknown(1)})
                     : ModelNode::pattern(0, inst(PatternName::Full, GridKind::Mask),
                                          {ModelNode::unknown(1)});
        break;
      case 3:
        if (iter % 2) {
          m = ModelNode::pattern(0, inst(PatternName::Vec),
                                 {ModelNode::expression(1, Expression::app({Fn::Add, 1},
                                                                           {Expression::var(100)})),
                                  ModelNode::unknown(2)});
        } else {
          m = ModelNode::pattern(0, inst(PatternName::Segment, GridKind::Mask),
                                 {ModelNode::unknown(1), ModelNode::unknown(2)});
        }
        break;
      case 4:
        m = iter % 2 ? ModelNode::pattern(
                           0, inst(PatternName::Vec),
                           {ModelNode::pattern(1, inst(PatternName::Square),
                                               {ModelNode::unknown(2)}),
                            ModelNode::unknown(3)})
                     : ModelNode::pattern(0, inst(PatternName::Monocolor, GridKind::Mask),
                                          {ModelNode::unknown(1), ModelNode::unknown(2)});
        break;
      case 5:
        m = ModelNode::pattern(0, inst(PatternName::Point, GridKind::Mask), {});
        break;
      case 6:
        m = ModelNode::expression(0, Expression::constant(vec_v(1, 1)));
        break;
      default:
        m = ModelNode::pattern(0, inst(PatternName::Monocolor, GridKind::Mask),
                               {ModelNode::expression(1, Expression::constant(color_v(0))),
                                ModelNode::unknown(2)});
        break;
    }
    if (iter % 8 == 5 || (iter % 8 == 4 && iter % 2 == 0) || iter % 8 == 7) {
      // mask-valued models need the mask distribution
      V = Distribution{GridDist::mask(IntDist::uniform(1, 2), IntDist::uniform(1, 2))};
    }
    if ((iter % 8 == 1 && iter % 2 == 0))
      V = Distribution{GridDist::mask(IntDist::uniform(1, 2), IntDist::uniform(1, 2))};

    // index all generated descriptions by value
    std::map<Value, std::vector<double>, ValueLess> generated;
    auto gs = generate(V, m, base_env);
    long total = 0;
    while (auto sd = gs.next()) {
      if (V.dl(sd->desc->value)) generated[sd->desc->value].push_back(sd->dl);
      if (++total > 30000) break;
    }
    // parse every support value
    auto vs = V.enumerate();
    int seen = 0;
    while (auto v = vs.next()) {
      std::vector<double> parsed;
      auto ps = parse(V, m, base_env, *v);
      while (auto sd = ps.next()) parsed.push_back(sd->dl);
      auto it = generated.find(*v);
      size_t gen_n = it == generated.end() ? 0 : it->second.size();
      ++checked_pairs;
      if (parsed.size() != gen_n) {
        ++mismatches;
      } else if (gen_n) {
        std::sort(parsed.begin(), parsed.end());
        std::sort(it->second.begin(), it->second.end());
        for (size_t k = 0; k < parsed.size(); ++k)
          if (std::abs(parsed[k] - it->second[k]) > 1e-9) ++mismatches;
      }
      if (++seen > 40) break;
    }
  }
  std::ostringstream os;
  os << checked_pairs << " (model, value) pairs, " << mismatches << " mismatches";
  report("parse-generate-duality", mismatches == 0, os.str());
}

// --- criterion 4: consistency anti-monotonicity ------------------------

void criterion_theorem2() {
  std::mt19937 rng(5);
  ParseParams pp;
  int violations = 0, tested = 0;
  auto rnd_grid = [&](int maxside) {
    Grid g(GridKind::Full, 1 + static_cast<int>(rng() % maxside),
           1 + static_cast<int>(rng() % maxside), 0);
    for (auto& c : g.cells) c = static_cast<std::uint8_t>(rng() % 10);
    return g;
  };
  for (int iter = 0; iter < 100; ++iter) {
    Grid in = rnd_grid(3), out = rnd_grid(3);
    // random inconsistent models: a constant somewhere that cannot match
    TaskModel M = TaskModel::initial();
    Grid wrong = out;
    wrong.at(0, 0) = static_cast<std::uint8_t>((wrong.at(0, 0) + 1 + rng() % 9) % 10);
    bool on_output = rng() % 2;
    if (on_output) {
      M = substitute(M, 1, ModelNode::expression(1, Expression::constant(Value(wrong))));
    } else {
      Grid wrong_in = in;
      wrong_in.at(0, 0) = static_cast<std::uint8_t>((wrong_in.at(0, 0) + 1 + rng() % 9) % 10);
      M = substitute(M, 0, ModelNode::expression(0, Expression::constant(Value(wrong_in))));
    }
    if (!describe(M, Value(in), Value(out), pp).empty()) continue;  // not inconsistent
    ++tested;
    // every minimal transition on the remaining unknown
    VarId x = on_output ? 0 : 1;
    std::vector<ModelPtr> subs;
    subs.push_back(ModelNode::expression(x, Expression::constant(Value(on_output ? in : out))));
    DistClass cls = DistClass::scalar(Tag::Grid, GridKind::Full);
    for (const PatternInstance& p : patterns_for_class(cls)) {
      std::vector<ModelPtr> parts;
      int fresh = 50;
      for (int i = 0; i < arity(p.id); ++i) parts.push_back(ModelNode::unknown(fresh++));
      subs.push_back(ModelNode::pattern(x, p, std::move(parts)));
    }
    for (const auto& sub : subs) {
      TaskModel M2 = substitute(M, x, sub);
      if (!describe(M2, Value(in), Value(out), pp).empty()) ++violations;
    }
  }
  std::ostringstream os;
  os << tested << " inconsistent toy models, " << violations << " violations";
  report("consistency-anti-monotone", tested >= 80 && violations == 0, os.str());
}

// --- criterion 5: running-task golden model ----------------------------

void criterion_golden() {
  auto t0 = Clock::now();
  Task task = corpus::quadrant_unfold_task();
  TaskModel M = corpus::quadrant_unfold_model();
  ParseParams pp;
  int correct = 0, total = 0;
  for (const auto& [in, out] : task.train) {
    ++total;
    auto preds = predict(M, Value(in), pp);
    if (!preds.empty() && compare(preds[0].first, Value(out)) == 0) ++correct;
  }
  ++total;
  auto preds = predict(M, Value(task.test[0].first), pp);
  if (!preds.empty() && compare(preds[0].first, Value(*task.test[0].second)) == 0) ++correct;
  double secs = elapsed(t0);
  std::ostringstream os;
  os << correct << "/" << total
     << " grids exact on first attempt (metagrid-unfold fixture), " << secs << "s";
  report("running-task-golden", correct == total && secs < 5.0, os.str());
}

// --- criteria 6-9: end-to-end solving, efficiency, logs, determinism --------

struct CorpusRun {
  std::vector<TaskOutcome> outcomes;
  int solved = 0;
  double max_seconds = 0;
};

CorpusRun run_corpus(const SearchParams& base) {
  CorpusRun run;
  for (const Task& task : corpus::curated30()) {
    TaskOutcome out = run_task(task, base);
    run.solved += out.solved;
    run.max_seconds = std::max(run.max_seconds, out.seconds);
    run.outcomes.push_back(std::move(out));
  }
  return run;
}

void criterion_endtoend_and_stats() {
  // Public-benchmark clause: runs only when the dataset is available.
  const char* data = std::getenv("MADIL_ARC_DATA");
  std::string dir = data ? data : "data/training";
  if (std::filesystem::is_directory(dir)) {
    SearchParams p;  // default parameters, 180 s budget
    std::vector<Task> tasks = load_tasks(dir);
    int solved = 0;
    for (const Task& t : tasks) {
      TaskOutcome o = run_task(t, p);
      solved += o.solved;
    }
    std::ostringstream os;
    os << solved << "/" << tasks.size() << " solved with default parameters";
    report("end-to-end-public-400", solved >= 60, os.str());
  } else {
    report_skip("end-to-end-public-400",
                "public task set not present (set MADIL_ARC_DATA to run); "
                "the curated synthetic corpus below covers the same families");
  }

  SearchParams p;
  p.budget_seconds = 60;
  auto t0 = Clock::now();
  CorpusRun run = run_corpus(p);
  std::ostringstream os;
  os << run.solved << "/30 solved, slowest task " << run.max_seconds << "s ("
     << elapsed(t0) << "s total)";
  report("end-to-end-curated-30", run.solved >= 20 && run.max_seconds <= 60.5, os.str());

  // criterion: search-efficiency sanity over the solved tasks
  std::vector<int> ranks;
  int first_rollout = 0;
  for (const auto& o : run.outcomes)
    if (o.solved) {
      ranks.push_back(o.log.best_rank);
      first_rollout += o.log.best_rollout == 1;
    }
  std::sort(ranks.begin(), ranks.end());
  double median_rank =
      ranks.empty() ? 99 : ranks[ranks.size() / 2];
  if (!ranks.empty() && ranks.size() % 2 == 0)
    median_rank = (ranks[ranks.size() / 2 - 1] + ranks[ranks.size() / 2]) / 2.0;
  std::ostringstream os2;
  os2 << "median solution rank " << median_rank << ", " << first_rollout << "/"
      << ranks.size() << " found on the first rollout";
  report("search-efficiency",
         !ranks.empty() && median_rank <= 2.0 &&
             2 * first_rollout >= static_cast<int>(ranks.size()),
         os2.str());

  // criterion: DL monotonicity and normalized range in every learning log
  bool monotone = true;
  for (const auto& o : run.outcomes) {
    std::map<int, double> last_by_rollout;
    for (const auto& s : o.log.steps) {
      auto it = last_by_rollout.find(s.rollout);
      if (it != last_by_rollout.end() && s.exact_dl >= it->second - 1e-9) monotone = false;
      last_by_rollout[s.rollout] = s.exact_dl;
      if (s.norm_dl < -1e-9 || s.norm_dl > 2.0 + 1e-9) monotone = false;
    }
  }
  report("greedy-dl-monotone", monotone,
         "accepted-model DLs strictly decrease; normalized DL within [0,2]");
}

void criterion_determinism() {
  SearchParams p;
  p.budget_seconds = 600;   // effort capped by rollouts, not wall-clock
  p.max_rollouts = 4;
  auto r1 = run_corpus(p);
  auto r2 = run_corpus(p);
  std::string d1 = predictions_to_json(r1.outcomes);
  std::string d2 = predictions_to_json(r2.outcomes);
  report("determinism", d1 == d2,
         d1 == d2 ? "two full runs produced byte-identical prediction documents"
                  : "prediction documents differ");
}

}  // namespace

int main() {
  std::cout << "MADIL acceptance criteria\n=========================\n";
  criterion_roundtrip();
  criterion_counting();
  criterion_duality();
  criterion_theorem2();
  criterion_golden();
  criterion_endtoend_and_stats();
  criterion_determinism();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED (skips noted above)\n"
                                : "FAILURES PRESENT\n");
  return g_failures == 0 ? 0 : 1;
}
