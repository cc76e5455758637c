#include "madil/patterns.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "madil/grid_ops.hpp"

namespace madil {

bool PatternId::operator<(const PatternId& o) const {
  auto key = [](const PatternId& p) {
    return std::tuple(static_cast<int>(p.name), static_cast<int>(p.kind), p.d, p.color_set);
  };
  return key(*this) < key(o);
}

int arity(const PatternId& id) {
  switch (id.name) {
    case PatternName::Point: return 0;
    case PatternName::IsFull: case PatternName::Empty: case PatternName::Full:
    case PatternName::Square: case PatternName::AsGrid: case PatternName::DomainMap:
    case PatternName::Repeat: case PatternName::Recoloring: case PatternName::Index:
      return 1;
    case PatternName::BgColor: case PatternName::Monocolor: case PatternName::Segment:
    case PatternName::Vec: case PatternName::Swap: case PatternName::Replace:
    case PatternName::ColorRow: case PatternName::ColorCol: case PatternName::ColorMat:
    case PatternName::Range: case PatternName::ObjP: case PatternName::Cons:
    case PatternName::Crop:
      return 2;
    case PatternName::MotifP: return 4;
    case PatternName::Objects: return 5;
    case PatternName::Metagrid: return 6;
  }
  return 0;
}

const std::vector<const char*>& part_names(const PatternId& id) {
  static const std::vector<const char*> none{};
  static const std::vector<const char*> bg{"bgcolor", "contents"};
  static const std::vector<const char*> mono{"color", "mask"};
  static const std::vector<const char*> motif{"motif", "core", "pure", "noise"};
  static const std::vector<const char*> grid1{"grid"};
  static const std::vector<const char*> size1{"size"};
  static const std::vector<const char*> seg{"len", "dir"};
  static const std::vector<const char*> vec{"i", "j"};
  static const std::vector<const char*> side{"side"};
  static const std::vector<const char*> cc{"c1", "c2"};
  static const std::vector<const char*> objs{"size", "seg", "order", "n", "objects"};
  static const std::vector<const char*> meta{"sepcolor", "borders", "dims",
                                             "heights", "widths", "subgrids"};
  static const std::vector<const char*> colorseq{"size", "colors"};
  static const std::vector<const char*> dmap{"colors"};
  static const std::vector<const char*> range{"start", "step"};
  static const std::vector<const char*> obj{"pos", "sprite"};
  static const std::vector<const char*> cons{"head", "tail"};
  static const std::vector<const char*> rep{"item"};
  static const std::vector<const char*> cropn{"pos", "size"};
  static const std::vector<const char*> reco{"cmap"};
  static const std::vector<const char*> idx{"idx"};
  switch (id.name) {
    case PatternName::BgColor: return bg;
    case PatternName::Monocolor: return mono;
    case PatternName::MotifP: return motif;
    case PatternName::IsFull: return grid1;
    case PatternName::Empty: case PatternName::Full: return size1;
    case PatternName::Point: return none;
    case PatternName::Segment: return seg;
    case PatternName::Vec: return vec;
    case PatternName::Square: return side;
    case PatternName::Swap: case PatternName::Replace: return cc;
    case PatternName::Objects: return objs;
    case PatternName::Metagrid: return meta;
    case PatternName::ColorRow: case PatternName::ColorCol: case PatternName::ColorMat:
      return colorseq;
    case PatternName::AsGrid: return grid1;
    case PatternName::DomainMap: return dmap;
    case PatternName::Range: return range;
    case PatternName::ObjP: return obj;
    case PatternName::Cons: return cons;
    case PatternName::Repeat: return rep;
    case PatternName::Crop: return cropn;
    case PatternName::Recoloring: return reco;
    case PatternName::Index: return idx;
  }
  return none;
}

std::string pattern_name(const PatternId& id) {
  switch (id.name) {
    case PatternName::BgColor: return "BgColor";
    case PatternName::Monocolor: return "Monocolor";
    case PatternName::MotifP: return "Motif";
    case PatternName::IsFull: return "IsFull";
    case PatternName::Empty: return "Empty";
    case PatternName::Full: return "Full";
    case PatternName::Point: return "Point";
    case PatternName::Segment: return "Segment";
    case PatternName::Vec: return "Vec";
    case PatternName::Square: return "Square";
    case PatternName::Swap: return "Swap";
    case PatternName::Replace: return "Replace";
    case PatternName::Objects: return "Objects";
    case PatternName::Metagrid: return "Metagrid";
    case PatternName::ColorRow: return "ColorRow";
    case PatternName::ColorCol: return "ColorCol";
    case PatternName::ColorMat: return "ColorMat";
    case PatternName::AsGrid: return "AsGrid";
    case PatternName::DomainMap: {
      std::string s = "DomainMap_";
      for (auto c : id.color_set) s += static_cast<char>('0' + c);
      return s;
    }
    case PatternName::Range: return "Range";
    case PatternName::ObjP: return "Obj";
    case PatternName::Cons: return "Cons_" + std::to_string(id.d);
    case PatternName::Repeat: return "Repeat_" + std::to_string(id.d);
    case PatternName::Crop: return "Crop";
    case PatternName::Recoloring: return "Recoloring";
    case PatternName::Index: return "Index";
  }
  return "?";
}

bool pure_decomposition(const PatternId& id) {
  switch (id.name) {
    case PatternName::Vec: case PatternName::ObjP: case PatternName::Cons:
    case PatternName::AsGrid:
      return true;
    default:
      return false;
  }
}

bool liftable(PatternName n) {
  return n != PatternName::Cons && n != PatternName::Repeat && n != PatternName::Index;
}

// --- helpers -----------------------------------------------------------

namespace {

const std::array<Vec2, 4> kSegmentDirs{Vec2{0, 1}, Vec2{1, 0}, Vec2{1, 1}, Vec2{1, -1}};

bool is_grid_kind(const Value& v, GridKind k) { return v.is_grid() && v.as_grid().kind == k; }

std::optional<std::uint8_t> single_color(const Grid& g) {
  std::optional<std::uint8_t> c;
  for (auto x : g.cells) {
    if (x == kTransparent) continue;
    if (c && *c != x) return std::nullopt;
    c = x;
  }
  return c;
}

GridKind noise_kind(GridKind whole) {
  return whole == GridKind::Mask ? GridKind::Mask : GridKind::Sprite;
}

// Grid-size bounds from a distribution, defaulting to the ARC limits.
struct SizeBounds {
  std::int64_t hlo = 1, hhi = kMaxSide, wlo = 1, whi = kMaxSide;
};

SizeBounds size_bounds(const Distribution& V) {
  SizeBounds b;
  if (auto* g = V.get<GridDist>()) {
    b.hlo = std::max<std::int64_t>(1, g->hd.lo);
    b.hhi = std::min<std::int64_t>(kMaxSide, g->hd.hi);
    b.wlo = std::max<std::int64_t>(1, g->wd.lo);
    b.whi = std::min<std::int64_t>(kMaxSide, g->wd.hi);
  } else if (auto* s = V.get<SingletonDist>()) {
    if (s->v.is_grid()) {
      b.hlo = b.hhi = s->v.as_grid().h;
      b.wlo = b.whi = s->v.as_grid().w;
    }
  }
  return b;
}

GridDist grid_dist_like(const Distribution& V, GridKind kind) {
  SizeBounds b = size_bounds(V);
  GridDist d;
  d.kind = kind;
  d.hd = IntDist::elias(b.hlo, b.hhi);
  d.wd = IntDist::elias(b.wlo, b.whi);
  return d;
}

// Applies f to the sub-sequences lying at depth d of v. delta is the depth
// change f induces on the mapped values (head: -1, tail: 0).
std::optional<Value> map_at_depth(const Value& v, int d,
                                  const std::function<std::optional<Value>(const Value&)>& f,
                                  int delta) {
  if (d == 0) return f(v);
  if (!v.is_seq()) return std::nullopt;
  std::vector<Value> items;
  for (const Value& x : v.as_seq().get()) {
    auto r = map_at_depth(x, d - 1, f, delta);
    if (!r) return std::nullopt;
    items.push_back(std::move(*r));
  }
  int item_depth = v.depth() - 1 + delta;
  for (const Value& x : items)
    if (x.depth() != item_depth) return std::nullopt;
  return seq_v(item_depth + 1, std::move(items));
}

}  // namespace

// --- scalar compose ------------------------------------------------------

namespace {

std::optional<Value> compose_scalar(const PatternInstance& P, const Environment& env,
                                    const std::vector<Value>& parts,
                                    const Distribution* whole_dist);

// Shared by lifted composition: per-item whole distribution when available.
const SeqShape* dist_shape(const Distribution* V) {
  if (!V) return nullptr;
  if (auto* s = V->get<SeqDist>()) return s->shape ? &*s->shape : nullptr;
  return nullptr;
}

std::optional<Value> compose_bgcolor(const std::vector<Value>& parts) {
  if (!parts[0].is_color() || !is_grid_kind(parts[1], GridKind::Sprite)) return std::nullopt;
  const Grid& s = parts[1].as_grid();
  Grid out(GridKind::Full, s.h, s.w, parts[0].as_color().code);
  out = overlay(out, s);
  return out.valid() ? std::optional<Value>(Value(std::move(out))) : std::nullopt;
}

std::optional<Value> compose_monocolor(GridKind kind, const std::vector<Value>& parts) {
  if (!parts[0].is_color() || !is_grid_kind(parts[1], GridKind::Mask)) return std::nullopt;
  const Grid& m = parts[1].as_grid();
  std::uint8_t c = parts[0].as_color().code;
  if (kind == GridKind::Full) {
    for (auto x : m.cells)
      if (x == kTransparent) return std::nullopt;  // full grids have no holes
    return Value(Grid(GridKind::Full, m.h, m.w, c));
  }
  Grid out(kind, m.h, m.w, kTransparent);
  bool any = false;
  for (size_t k = 0; k < m.cells.size(); ++k)
    if (m.cells[k] != kTransparent) {
      out.cells[k] = c;
      any = true;
    }
  if (!any) return std::nullopt;  // empty sprites belong to Empty
  if (kind == GridKind::Mask && c != kBlack) return std::nullopt;
  return Value(std::move(out));
}

std::optional<Value> compose_motif(GridKind kind, const std::vector<Value>& parts) {
  if (!parts[0].is_motif() || !parts[1].is_grid() || !parts[2].is_grid() ||
      !parts[3].is_grid())
    return std::nullopt;
  const Grid& core = parts[1].as_grid();
  const Grid& pure = parts[2].as_grid();
  const Grid& noise = parts[3].as_grid();
  if (core.kind != kind || pure.kind != kind) return std::nullopt;
  if (noise.kind != noise_kind(kind)) return std::nullopt;
  auto expanded = expand_motif(parts[0].as_motif(), core);
  if (!expanded || !(*expanded == pure)) return std::nullopt;
  if (noise.h != pure.h || noise.w != pure.w) return std::nullopt;
  Grid out = overlay(pure, noise);
  return out.valid() ? std::optional<Value>(Value(std::move(out))) : std::nullopt;
}

std::optional<Value> compose_metagrid(GridKind kind, const std::vector<Value>& parts) {
  if (!parts[0].is_color() || !is_grid_kind(parts[1], GridKind::Mask) ||
      !parts[2].is_vec() || parts[3].depth() != 1 || parts[4].depth() != 1 ||
      parts[5].depth() != 2)
    return std::nullopt;
  std::uint8_t sep = parts[0].as_color().code;
  const Grid& borders = parts[1].as_grid();
  if (borders.h != 2 || borders.w != 2) return std::nullopt;
  bool top = borders.at(0, 0) != kTransparent, right = borders.at(0, 1) != kTransparent;
  bool left = borders.at(1, 0) != kTransparent, bottom = borders.at(1, 1) != kTransparent;
  std::int64_t k = parts[2].as_vec().i, l = parts[2].as_vec().j;
  const auto& heights = parts[3].as_seq().get();
  const auto& widths = parts[4].as_seq().get();
  const auto& rows = parts[5].as_seq().get();
  if (k < 1 || l < 1 || heights.size() != static_cast<size_t>(k) ||
      widths.size() != static_cast<size_t>(l) || rows.size() != static_cast<size_t>(k))
    return std::nullopt;
  if (k * l < 2) return std::nullopt;
  std::int64_t H = top + bottom + (k - 1), W = left + right + (l - 1);
  std::vector<std::int64_t> hs, ws;
  for (const auto& x : heights) {
    if (!x.is_int() || x.as_int() < 1) return std::nullopt;
    hs.push_back(x.as_int());
    H += x.as_int();
  }
  for (const auto& x : widths) {
    if (!x.is_int() || x.as_int() < 1) return std::nullopt;
    ws.push_back(x.as_int());
    W += x.as_int();
  }
  if (H > kMaxSide || W > kMaxSide) return std::nullopt;
  if (kind == GridKind::Mask && sep != kBlack) return std::nullopt;
  Grid out(kind, static_cast<int>(H), static_cast<int>(W), sep);
  std::int64_t i0 = top;
  for (std::int64_t a = 0; a < k; ++a) {
    std::int64_t j0 = left;
    const auto& row = rows[a];
    if (row.depth() != 1 || row.as_seq().len() != static_cast<size_t>(l))
      return std::nullopt;
    for (std::int64_t b = 0; b < l; ++b) {
      const Value& sub = row.as_seq().get()[b];
      if (!sub.is_grid()) return std::nullopt;
      const Grid& sg = sub.as_grid();
      if (sg.kind != kind || sg.h != hs[a] || sg.w != ws[b]) return std::nullopt;
      for (int i = 0; i < sg.h; ++i)
        for (int j = 0; j < sg.w; ++j)
          out.at(static_cast<int>(i0) + i, static_cast<int>(j0) + j) = sg.at(i, j);
      j0 += ws[b] + 1;
    }
    i0 += hs[a] + 1;
  }
  return out.valid() ? std::optional<Value>(Value(std::move(out))) : std::nullopt;
}

std::optional<Value> compose_objects(GridKind kind, const std::vector<Value>& parts) {
  if (!parts[0].is_vec() || !parts[1].is_int() || !parts[2].is_int() ||
      !parts[3].is_int() || parts[4].depth() != 1)
    return std::nullopt;
  std::int64_t h = parts[0].as_vec().i, w = parts[0].as_vec().j;
  if (h < 1 || w < 1 || h > kMaxSide || w > kMaxSide) return std::nullopt;
  std::int64_t seg = parts[1].as_int(), ord = parts[2].as_int();
  if (seg < 0 || seg > 3 || ord < 0 || ord > 2) return std::nullopt;
  const auto& objs = parts[4].as_seq().get();
  if (parts[3].as_int() != static_cast<std::int64_t>(objs.size()) || objs.empty())
    return std::nullopt;
  Grid out(kind, static_cast<int>(h), static_cast<int>(w), kTransparent);
  for (const Value& ov : objs) {
    if (!ov.is_obj()) return std::nullopt;
    const Obj& o = ov.as_obj();
    out = overlay(out, o.sprite, static_cast<int>(o.pos.i), static_cast<int>(o.pos.j));
  }
  return Value(std::move(out));
}

std::optional<Value> compose_colorseq(const PatternId& id, const std::vector<Value>& parts) {
  GridKind kind = id.kind;
  switch (id.name) {
    case PatternName::ColorRow: {
      if (!parts[0].is_int() || parts[1].depth() != 1) return std::nullopt;
      const auto& cs = parts[1].as_seq().get();
      if (parts[0].as_int() != static_cast<std::int64_t>(cs.size()) || cs.empty())
        return std::nullopt;
      Grid g(kind, 1, static_cast<int>(cs.size()), 0);
      for (size_t t = 0; t < cs.size(); ++t) {
        if (!cs[t].is_color()) return std::nullopt;
        g.cells[t] = cs[t].as_color().code;
      }
      return g.valid() ? std::optional<Value>(Value(std::move(g))) : std::nullopt;
    }
    case PatternName::ColorCol: {
      if (!parts[0].is_int() || parts[1].depth() != 1) return std::nullopt;
      const auto& cs = parts[1].as_seq().get();
      if (parts[0].as_int() != static_cast<std::int64_t>(cs.size()) || cs.empty())
        return std::nullopt;
      Grid g(kind, static_cast<int>(cs.size()), 1, 0);
      for (size_t t = 0; t < cs.size(); ++t) {
        if (!cs[t].is_color()) return std::nullopt;
        g.cells[t] = cs[t].as_color().code;
      }
      return g.valid() ? std::optional<Value>(Value(std::move(g))) : std::nullopt;
    }
    default: {  // ColorMat
      if (!parts[0].is_vec() || parts[1].depth() != 2) return std::nullopt;
      std::int64_t h = parts[0].as_vec().i, w = parts[0].as_vec().j;
      if (h < 1 || w < 1 || h > kMaxSide || w > kMaxSide) return std::nullopt;
      const auto& rows = parts[1].as_seq().get();
      if (rows.size() != static_cast<size_t>(h)) return std::nullopt;
      Grid g(id.kind, static_cast<int>(h), static_cast<int>(w), 0);
      for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].depth() != 1 || rows[i].as_seq().len() != static_cast<size_t>(w))
          return std::nullopt;
        for (size_t j = 0; j < static_cast<size_t>(w); ++j) {
          const Value& c = rows[i].as_seq().get()[j];
          if (!c.is_color()) return std::nullopt;
          g.at(static_cast<int>(i), static_cast<int>(j)) = c.as_color().code;
        }
      }
      return g.valid() ? std::optional<Value>(Value(std::move(g))) : std::nullopt;
    }
  }
}

std::optional<Value> compose_cons(const Value& head, const Value& tail, int d) {
  if (d == 0) {
    if (!tail.is_seq()) return std::nullopt;
    if (head.depth() != tail.depth() - 1) return std::nullopt;
    std::vector<Value> items;
    items.push_back(head);
    for (const Value& x : tail.as_seq().get()) items.push_back(x);
    return seq_v(tail.depth(), std::move(items));
  }
  if (!head.is_seq() || !tail.is_seq()) return std::nullopt;
  if (head.as_seq().len() != tail.as_seq().len()) return std::nullopt;
  std::vector<Value> items;
  for (size_t k = 0; k < tail.as_seq().len(); ++k) {
    auto r = compose_cons(head.as_seq().get()[k], tail.as_seq().get()[k], d - 1);
    if (!r) return std::nullopt;
    items.push_back(std::move(*r));
  }
  return seq_v(tail.depth(), std::move(items));
}

std::optional<Value> compose_repeat(const Value& item, int d, const SeqShape* shape) {
  if (!shape) return std::nullopt;
  if (d == 0) {
    if (shape->len < 0) return std::nullopt;
    std::vector<Value> items(static_cast<size_t>(shape->len), item);
    return seq_v(item.depth() + 1, std::move(items));
  }
  if (!item.is_seq()) return std::nullopt;
  if (shape->len != static_cast<int>(item.as_seq().len())) return std::nullopt;
  if (shape->kids.size() != item.as_seq().len()) return std::nullopt;
  std::vector<Value> items;
  for (size_t k = 0; k < item.as_seq().len(); ++k) {
    auto r = compose_repeat(item.as_seq().get()[k], d - 1, &shape->kids[k]);
    if (!r) return std::nullopt;
    items.push_back(std::move(*r));
  }
  return seq_v(item.depth() + 1, std::move(items));
}

std::optional<Value> seq_at_path(const Value& s, const std::vector<std::int64_t>& path) {
  const Value* cur = &s;
  for (std::int64_t p : path) {
    if (!cur->is_seq() || p < 0 || p >= static_cast<std::int64_t>(cur->as_seq().len()))
      return std::nullopt;
    cur = &cur->as_seq().get()[static_cast<size_t>(p)];
  }
  return *cur;
}

std::optional<Value> eval_param(const PatternInstance& P, const Environment& env) {
  if (!P.dep_param) return std::nullopt;
  return eval(*P.dep_param, env);
}

Grid recolor(const Grid& g, const ColorMap& m) {
  Grid out = g;
  for (auto& c : out.cells)
    if (c != kTransparent) c = m.apply(c);
  return out;
}

std::optional<Value> compose_scalar(const PatternInstance& P, const Environment& env,
                                    const std::vector<Value>& parts,
                                    const Distribution* whole_dist) {
  const PatternId& id = P.id;
  switch (id.name) {
    case PatternName::BgColor:
      return compose_bgcolor(parts);
    case PatternName::Monocolor:
      return compose_monocolor(id.kind, parts);
    case PatternName::MotifP:
      return compose_motif(id.kind, parts);
    case PatternName::IsFull: {
      if (!is_grid_kind(parts[0], GridKind::Full)) return std::nullopt;
      Grid g = parts[0].as_grid();
      g.kind = GridKind::Sprite;
      return Value(std::move(g));
    }
    case PatternName::Empty: case PatternName::Full: {
      if (!parts[0].is_vec()) return std::nullopt;
      std::int64_t h = parts[0].as_vec().i, w = parts[0].as_vec().j;
      if (h < 1 || w < 1 || h > kMaxSide || w > kMaxSide) return std::nullopt;
      std::uint8_t fill = id.name == PatternName::Full ? kBlack : kTransparent;
      return Value(Grid(id.kind, static_cast<int>(h), static_cast<int>(w), fill));
    }
    case PatternName::Point:
      return Value(Grid(GridKind::Mask, 1, 1, kBlack));
    case PatternName::Segment: {
      if (!parts[0].is_int() || !parts[1].is_vec()) return std::nullopt;
      std::int64_t len = parts[0].as_int();
      Vec2 dir = parts[1].as_vec();
      if (len < 1) return std::nullopt;
      bool valid_dir = false;
      for (const auto& d : kSegmentDirs) valid_dir |= (d == dir);
      if (!valid_dir) return std::nullopt;
      std::int64_t h = 1 + (len - 1) * std::llabs(dir.i);
      std::int64_t w = 1 + (len - 1) * std::llabs(dir.j);
      if (h > kMaxSide || w > kMaxSide) return std::nullopt;
      Grid m(GridKind::Mask, static_cast<int>(h), static_cast<int>(w), kTransparent);
      std::int64_t i = 0, j = dir.j < 0 ? w - 1 : 0;
      for (std::int64_t t = 0; t < len; ++t) {
        m.at(static_cast<int>(i), static_cast<int>(j)) = kBlack;
        i += dir.i;
        j += dir.j;
      }
      return Value(std::move(m));
    }
    case PatternName::Vec:
      if (!parts[0].is_int() || !parts[1].is_int()) return std::nullopt;
      return vec_v(parts[0].as_int(), parts[1].as_int());
    case PatternName::Square:
      if (!parts[0].is_int()) return std::nullopt;
      return vec_v(parts[0].as_int(), parts[0].as_int());
    case PatternName::Swap: {
      if (!parts[0].is_color() || !parts[1].is_color()) return std::nullopt;
      std::uint8_t a = parts[0].as_color().code, b = parts[1].as_color().code;
      if (a >= b) return std::nullopt;  // canonical order, distinct
      ColorMap m;
      m.to[a] = b;
      m.to[b] = a;
      return Value(m);
    }
    case PatternName::Replace: {
      if (!parts[0].is_color() || !parts[1].is_color()) return std::nullopt;
      std::uint8_t a = parts[0].as_color().code, b = parts[1].as_color().code;
      if (a == b) return std::nullopt;
      ColorMap m;
      m.to[a] = b;
      return Value(m);
    }
    case PatternName::Objects:
      return compose_objects(id.kind, parts);
    case PatternName::Metagrid:
      return compose_metagrid(id.kind, parts);
    case PatternName::ColorRow: case PatternName::ColorCol: case PatternName::ColorMat:
      return compose_colorseq(id, parts);
    case PatternName::AsGrid: {
      if (!is_grid_kind(parts[0], GridKind::Full)) return std::nullopt;
      const Grid& g = parts[0].as_grid();
      std::vector<Value> rows;
      for (int i = 0; i < g.h; ++i) {
        std::vector<Value> row;
        for (int j = 0; j < g.w; ++j) row.push_back(color_v(g.at(i, j)));
        rows.push_back(seq_v(1, std::move(row)));
      }
      return seq_v(2, std::move(rows));
    }
    case PatternName::DomainMap: {
      if (parts[0].depth() != 1) return std::nullopt;
      const auto& cs = parts[0].as_seq().get();
      if (cs.size() != id.color_set.size()) return std::nullopt;
      ColorMap m;
      for (size_t k = 0; k < cs.size(); ++k) {
        if (!cs[k].is_color()) return std::nullopt;
        m.to[id.color_set[k]] = cs[k].as_color().code;
      }
      return Value(m);
    }
    case PatternName::Range: {
      if (!parts[0].is_int() || !parts[1].is_int()) return std::nullopt;
      const SeqShape* sh = dist_shape(whole_dist);
      if (!sh) return std::nullopt;
      std::vector<Value> items;
      for (int t = 0; t < sh->len; ++t)
        items.push_back(int_v(parts[0].as_int() + t * parts[1].as_int()));
      if (items.empty()) return std::nullopt;
      return seq_v(1, std::move(items));
    }
    case PatternName::ObjP: {
      if (!parts[0].is_vec() || !is_grid_kind(parts[1], GridKind::Sprite))
        return std::nullopt;
      return Value(Obj{parts[0].as_vec(), parts[1].as_grid()});
    }
    case PatternName::Cons:
      return compose_cons(parts[0], parts[1], id.d);
    case PatternName::Repeat: {
      const SeqShape* sh = dist_shape(whole_dist);
      return compose_repeat(parts[0], id.d, sh);
    }
    case PatternName::Crop: {
      auto g0 = eval_param(P, env);
      if (!g0 || !g0->is_grid() || !parts[0].is_vec() || !parts[1].is_vec())
        return std::nullopt;
      const Vec2& pos = parts[0].as_vec();
      const Vec2& sz = parts[1].as_vec();
      auto sub = crop(g0->as_grid(), static_cast<int>(pos.i), static_cast<int>(pos.j),
                      static_cast<int>(sz.i), static_cast<int>(sz.j));
      if (!sub) return std::nullopt;
      sub->kind = id.kind;
      return sub->valid() ? std::optional<Value>(Value(std::move(*sub))) : std::nullopt;
    }
    case PatternName::Recoloring: {
      auto s0 = eval_param(P, env);
      if (!s0 || !s0->is_grid() || !parts[0].is_colormap()) return std::nullopt;
      Grid out = recolor(s0->as_grid(), parts[0].as_colormap());
      out.kind = id.kind;
      return out.valid() ? std::optional<Value>(Value(std::move(out))) : std::nullopt;
    }
    case PatternName::Index: {
      auto s0 = eval_param(P, env);
      if (!s0 || parts[0].depth() != 1) return std::nullopt;
      std::vector<std::int64_t> path;
      for (const Value& x : parts[0].as_seq().get()) {
        if (!x.is_int()) return std::nullopt;
        path.push_back(x.as_int());
      }
      if (static_cast<int>(path.size()) != id.d) return std::nullopt;
      return seq_at_path(*s0, path);
    }
  }
  return std::nullopt;
}

// --- scalar decompose ---------------------------------------------------

using Tuples = std::vector<std::vector<Value>>;

Tuples decompose_bgcolor(const Grid& g) {
  Tuples out;
  for (std::uint8_t c : colors_by_frequency(g)) {
    Grid s = g;
    s.kind = GridKind::Sprite;
    for (auto& x : s.cells)
      if (x == c) x = kTransparent;
    out.push_back({color_v(c), Value(std::move(s))});
  }
  return out;
}

Tuples decompose_monocolor(GridKind kind, const Grid& g) {
  auto c = single_color(g);
  if (!c) return {};
  if (kind == GridKind::Full) {
    return {{color_v(*c), Value(Grid(GridKind::Mask, g.h, g.w, kBlack))}};
  }
  Grid m(GridKind::Mask, g.h, g.w, kTransparent);
  for (size_t k = 0; k < g.cells.size(); ++k)
    if (g.cells[k] != kTransparent) m.cells[k] = kBlack;
  return {{color_v(*c), Value(std::move(m))}};
}

Tuples decompose_motif(GridKind kind, const Grid& g) {
  Tuples out;
  for (auto& [motif, core] : motif_candidates(g)) {
    auto pure = expand_motif(motif, core);
    if (!pure || pure->h != g.h || pure->w != g.w) continue;
    Grid noise(noise_kind(kind), g.h, g.w, kTransparent);
    int noise_count = 0;
    bool representable = true;
    for (size_t t = 0; t < g.cells.size() && representable; ++t) {
      if (g.cells[t] == pure->cells[t]) continue;
      if (g.cells[t] == kTransparent) representable = false;  // holes are not noise
      noise.cells[t] = g.cells[t];
      ++noise_count;
    }
    if (!representable) continue;
    // Keep decompositions that actually compress: small noise and a core
    // strictly smaller than the grid (or an exact match).
    if (noise_count * 4 > static_cast<int>(g.area())) continue;
    if (core.area() >= g.area() && noise_count > 0) continue;
    if (core.area() >= g.area()) {
      bool symmetric = *pure == g;
      if (!symmetric) continue;
    }
    out.push_back({Value(motif), Value(core), Value(std::move(*pure)), Value(std::move(noise))});
  }
  return out;
}

Tuples decompose_segment(const Grid& m) {
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < m.h; ++i)
    for (int j = 0; j < m.w; ++j)
      if (m.at(i, j) != kTransparent) cells.push_back({i, j});
  if (cells.empty()) return {};
  if (cells.size() == 1) {
    // a single cell is a degenerate segment in every direction
    if (m.h != 1 || m.w != 1) return {};
    Tuples out;
    for (const Vec2& dir : kSegmentDirs) out.push_back({int_v(1), Value(dir)});
    return out;
  }
  std::sort(cells.begin(), cells.end());
  std::int64_t n = static_cast<std::int64_t>(cells.size());
  for (const Vec2& dir : kSegmentDirs) {
    std::int64_t i0 = cells[0].first, j0 = cells[0].second;
    bool ok = true;
    for (std::int64_t t = 0; t < n && ok; ++t)
      ok = cells[static_cast<size_t>(t)] ==
           std::make_pair(static_cast<int>(i0 + t * dir.i), static_cast<int>(j0 + t * dir.j));
    if (!ok) continue;
    // the mask must be the tight bounding box of the segment
    std::int64_t h = 1 + (n - 1) * std::llabs(dir.i), w = 1 + (n - 1) * std::llabs(dir.j);
    if (h != m.h || w != m.w) continue;
    std::int64_t startj = dir.j < 0 ? w - 1 : 0;
    if (i0 != 0 || j0 != startj) continue;
    return {{int_v(n), Value(dir)}};
  }
  return {};
}

Tuples decompose_objects(GridKind kind, const Grid& g) {
  (void)kind;
  Tuples out;
  for (int seg = 0; seg < 4; ++seg) {
    bool diag = seg == 1 || seg == 3;
    bool same = seg <= 1;
    auto comps = components(g, diag, same);
    if (comps.empty()) continue;
    for (int ord = 0; ord < 3; ++ord) {
      auto sorted = comps;
      std::stable_sort(sorted.begin(), sorted.end(), [&](const Component& a, const Component& b) {
        auto pos = [](const Component& c) { return std::make_pair(c.i0, c.j0); };
        switch (ord) {
          case 0:
            if (a.area() != b.area()) return a.area() > b.area();
            return pos(a) < pos(b);
          case 1:
            return pos(a) < pos(b);
          default:
            if (a.height() != b.height()) return a.height() > b.height();
            return pos(a) < pos(b);
        }
      });
      std::vector<Value> objs;
      for (const auto& c : sorted) objs.push_back(Value(component_to_obj(g, c)));
      out.push_back({vec_v(g.h, g.w), int_v(seg), int_v(ord),
                     int_v(static_cast<std::int64_t>(objs.size())),
                     seq_v(1, std::move(objs))});
    }
  }
  return out;
}

Tuples decompose_metagrid(GridKind kind, const Grid& g) {
  Tuples out;
  std::vector<std::pair<int, std::uint8_t>> cands;
  for (std::uint8_t c : colors_by_frequency(g)) {
    int lines = 0;
    for (int i = 0; i < g.h; ++i) {
      bool all = true;
      for (int j = 0; j < g.w && all; ++j) all = g.at(i, j) == c;
      lines += all;
    }
    for (int j = 0; j < g.w; ++j) {
      bool all = true;
      for (int i = 0; i < g.h && all; ++i) all = g.at(i, j) == c;
      lines += all;
    }
    if (lines > 0) cands.push_back({-lines, c});
  }
  std::stable_sort(cands.begin(), cands.end());

  for (auto& [neg, sep] : cands) {
    (void)neg;
    std::vector<int> seprows, sepcols;
    for (int i = 0; i < g.h; ++i) {
      bool all = true;
      for (int j = 0; j < g.w && all; ++j) all = g.at(i, j) == sep;
      if (all) seprows.push_back(i);
    }
    for (int j = 0; j < g.w; ++j) {
      bool all = true;
      for (int i = 0; i < g.h && all; ++i) all = g.at(i, j) == sep;
      if (all) sepcols.push_back(j);
    }
    if (seprows.empty() && sepcols.empty()) continue;
    // no adjacent separators, content between them
    auto bands = [](const std::vector<int>& seps, int extent)
        -> std::optional<std::vector<std::pair<int, int>>> {
      std::vector<std::pair<int, int>> bs;
      int start = 0;
      for (int s : seps) {
        if (s > start) bs.push_back({start, s - start});
        else if (s == start && start > 0) return std::nullopt;  // adjacent separators
        start = s + 1;
      }
      if (start < extent) bs.push_back({start, extent - start});
      if (bs.empty()) return std::nullopt;
      return bs;
    };
    auto rb = bands(seprows, g.h);
    auto cb = bands(sepcols, g.w);
    if (!rb || !cb) continue;
    std::int64_t k = static_cast<std::int64_t>(rb->size());
    std::int64_t l = static_cast<std::int64_t>(cb->size());
    bool top = !seprows.empty() && seprows.front() == 0;
    bool bottom = !seprows.empty() && seprows.back() == g.h - 1;
    bool left = !sepcols.empty() && sepcols.front() == 0;
    bool right = !sepcols.empty() && sepcols.back() == g.w - 1;
    // Interior separator count must equal k-1 / l-1 (thickness one).
    if (static_cast<std::int64_t>(seprows.size()) != (k - 1) + top + bottom) continue;
    if (static_cast<std::int64_t>(sepcols.size()) != (l - 1) + left + right) continue;
    if (k * l < 2) continue;
    Grid borders(GridKind::Mask, 2, 2, kTransparent);
    if (top) borders.at(0, 0) = kBlack;
    if (right) borders.at(0, 1) = kBlack;
    if (left) borders.at(1, 0) = kBlack;
    if (bottom) borders.at(1, 1) = kBlack;
    std::vector<Value> heights, widths, rows;
    for (auto& [s, len] : *rb) heights.push_back(int_v(len));
    for (auto& [s, len] : *cb) widths.push_back(int_v(len));
    for (auto& [ri, rh] : *rb) {
      std::vector<Value> row;
      for (auto& [cj, cw] : *cb) {
        auto sub = crop(g, ri, cj, rh, cw);
        row.push_back(Value(std::move(*sub)));
      }
      rows.push_back(seq_v(1, std::move(row)));
    }
    out.push_back({color_v(sep), Value(std::move(borders)), vec_v(k, l),
                   seq_v(1, std::move(heights)), seq_v(1, std::move(widths)),
                   seq_v(2, std::move(rows))});
  }
  (void)kind;
  return out;
}

Tuples decompose_scalar_list(const PatternInstance& P, const Environment& env, const Value& v) {
  const PatternId& id = P.id;
  switch (id.name) {
    case PatternName::BgColor:
      if (!is_grid_kind(v, GridKind::Full)) return {};
      return decompose_bgcolor(v.as_grid());
    case PatternName::Monocolor:
      if (!is_grid_kind(v, id.kind)) return {};
      return decompose_monocolor(id.kind, v.as_grid());
    case PatternName::MotifP:
      if (!is_grid_kind(v, id.kind)) return {};
      return decompose_motif(id.kind, v.as_grid());
    case PatternName::IsFull: {
      if (!is_grid_kind(v, GridKind::Sprite)) return {};
      for (auto c : v.as_grid().cells)
        if (c == kTransparent) return {};
      Grid g = v.as_grid();
      g.kind = GridKind::Full;
      return {{Value(std::move(g))}};
    }
    case PatternName::Empty: {
      if (!is_grid_kind(v, id.kind)) return {};
      for (auto c : v.as_grid().cells)
        if (c != kTransparent) return {};
      return {{vec_v(v.as_grid().h, v.as_grid().w)}};
    }
    case PatternName::Full: {
      if (!is_grid_kind(v, GridKind::Mask)) return {};
      for (auto c : v.as_grid().cells)
        if (c != kBlack) return {};
      return {{vec_v(v.as_grid().h, v.as_grid().w)}};
    }
    case PatternName::Point: {
      if (!is_grid_kind(v, GridKind::Mask)) return {};
      const Grid& g = v.as_grid();
      if (g.h == 1 && g.w == 1 && g.at(0, 0) == kBlack) return {{}};
      return {};
    }
    case PatternName::Segment:
      if (!is_grid_kind(v, GridKind::Mask)) return {};
      return decompose_segment(v.as_grid());
    case PatternName::Vec:
      if (!v.is_vec()) return {};
      return {{int_v(v.as_vec().i), int_v(v.as_vec().j)}};
    case PatternName::Square:
      if (!v.is_vec() || v.as_vec().i != v.as_vec().j) return {};
      return {{int_v(v.as_vec().i)}};
    case PatternName::Swap: {
      if (!v.is_colormap()) return {};
      const ColorMap& m = v.as_colormap();
      if (m.domain_size() != 2) return {};
      std::uint8_t a = 255, b = 255;
      for (std::uint8_t c = 0; c < kNumColors; ++c)
        if (m.has(c)) (a == 255 ? a : b) = c;
      if (m.to[a] != b || m.to[b] != a) return {};
      return {{color_v(a), color_v(b)}};
    }
    case PatternName::Replace: {
      if (!v.is_colormap()) return {};
      const ColorMap& m = v.as_colormap();
      if (m.domain_size() != 1) return {};
      for (std::uint8_t c = 0; c < kNumColors; ++c)
        if (m.has(c)) {
          if (m.to[c] == c) return {};
          return {{color_v(c), color_v(m.to[c])}};
        }
      return {};
    }
    case PatternName::Objects:
      if (!is_grid_kind(v, id.kind)) return {};
      return decompose_objects(id.kind, v.as_grid());
    case PatternName::Metagrid:
      if (!is_grid_kind(v, id.kind)) return {};
      return decompose_metagrid(id.kind, v.as_grid());
    case PatternName::ColorRow: {
      if (!is_grid_kind(v, id.kind) || v.as_grid().h != 1) return {};
      const Grid& g = v.as_grid();
      std::vector<Value> cs;
      for (auto c : g.cells) {
        if (c == kTransparent) return {};
        cs.push_back(color_v(c));
      }
      return {{int_v(g.w), seq_v(1, std::move(cs))}};
    }
    case PatternName::ColorCol: {
      if (!is_grid_kind(v, id.kind) || v.as_grid().w != 1) return {};
      const Grid& g = v.as_grid();
      std::vector<Value> cs;
      for (auto c : g.cells) {
        if (c == kTransparent) return {};
        cs.push_back(color_v(c));
      }
      return {{int_v(g.h), seq_v(1, std::move(cs))}};
    }
    case PatternName::ColorMat: {
      if (!is_grid_kind(v, id.kind)) return {};
      const Grid& g = v.as_grid();
      std::vector<Value> rows;
      for (int i = 0; i < g.h; ++i) {
        std::vector<Value> row;
        for (int j = 0; j < g.w; ++j) {
          if (g.at(i, j) == kTransparent) return {};
          row.push_back(color_v(g.at(i, j)));
        }
        rows.push_back(seq_v(1, std::move(row)));
      }
      return {{vec_v(g.h, g.w), seq_v(2, std::move(rows))}};
    }
    case PatternName::AsGrid: {
      if (v.depth() != 2 || v.as_seq().len() == 0) return {};
      const auto& rows = v.as_seq().get();
      size_t w = rows[0].as_seq().len();
      if (w == 0) return {};
      Grid g(GridKind::Full, static_cast<int>(rows.size()), static_cast<int>(w), 0);
      for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].as_seq().len() != w) return {};
        for (size_t j = 0; j < w; ++j) {
          const Value& c = rows[i].as_seq().get()[j];
          if (!c.is_color()) return {};
          g.at(static_cast<int>(i), static_cast<int>(j)) = c.as_color().code;
        }
      }
      if (!g.valid()) return {};
      return {{Value(std::move(g))}};
    }
    case PatternName::DomainMap: {
      if (!v.is_colormap()) return {};
      const ColorMap& m = v.as_colormap();
      std::vector<std::uint8_t> dom;
      for (std::uint8_t c = 0; c < kNumColors; ++c)
        if (m.has(c)) dom.push_back(c);
      if (dom != id.color_set) return {};
      std::vector<Value> cs;
      for (auto c : dom) cs.push_back(color_v(m.to[c]));
      return {{seq_v(1, std::move(cs))}};
    }
    case PatternName::Range: {
      if (v.depth() != 1 || v.as_seq().len() < 2) return {};
      const auto& xs = v.as_seq().get();
      for (const auto& x : xs)
        if (!x.is_int()) return {};
      std::int64_t start = xs[0].as_int(), step = xs[1].as_int() - xs[0].as_int();
      for (size_t t = 0; t < xs.size(); ++t)
        if (xs[t].as_int() != start + static_cast<std::int64_t>(t) * step) return {};
      return {{int_v(start), int_v(step)}};
    }
    case PatternName::ObjP: {
      if (!v.is_obj()) return {};
      return {{Value(v.as_obj().pos), Value(v.as_obj().sprite)}};
    }
    case PatternName::Cons: {
      auto head = map_at_depth(v, id.d, [](const Value& s) -> std::optional<Value> {
        if (!s.is_seq() || s.as_seq().len() == 0) return std::nullopt;
        return s.as_seq().get()[0];
      }, -1);
      auto tail = map_at_depth(v, id.d, [](const Value& s) -> std::optional<Value> {
        if (!s.is_seq() || s.as_seq().len() == 0) return std::nullopt;
        auto items = s.as_seq().get();
        return seq_v(s.depth(), {items.begin() + 1, items.end()});
      }, 0);
      if (!head || !tail) return {};
      return {{std::move(*head), std::move(*tail)}};
    }
    case PatternName::Repeat: {
      auto item = map_at_depth(v, id.d, [](const Value& s) -> std::optional<Value> {
        if (!s.is_seq() || s.as_seq().len() == 0) return std::nullopt;
        const auto& xs = s.as_seq().get();
        for (size_t t = 1; t < xs.size(); ++t)
          if (!(xs[t] == xs[0])) return std::nullopt;
        return xs[0];
      }, -1);
      if (!item) return {};
      return {{std::move(*item)}};
    }
    case PatternName::Crop: {
      auto g0 = eval_param(P, env);
      if (!g0 || !g0->is_grid() || !v.is_grid()) return {};
      const Grid& big = g0->as_grid();
      const Grid& sub = v.as_grid();
      if (sub.kind != big.kind || sub.h > big.h || sub.w > big.w) return {};
      Tuples out;
      for (int i = 0; i + sub.h <= big.h; ++i)
        for (int j = 0; j + sub.w <= big.w; ++j) {
          bool eq = true;
          for (int a = 0; a < sub.h && eq; ++a)
            for (int b = 0; b < sub.w && eq; ++b) eq = big.at(i + a, j + b) == sub.at(a, b);
          if (eq) out.push_back({vec_v(i, j), vec_v(sub.h, sub.w)});
        }
      return out;
    }
    case PatternName::Recoloring: {
      auto s0 = eval_param(P, env);
      if (!s0 || !s0->is_grid() || !v.is_grid()) return {};
      const Grid& a = s0->as_grid();
      const Grid& b = v.as_grid();
      if (a.h != b.h || a.w != b.w || a.kind != b.kind) return {};
      ColorMap m;
      for (size_t t = 0; t < a.cells.size(); ++t) {
        bool ta = a.cells[t] == kTransparent, tb = b.cells[t] == kTransparent;
        if (ta != tb) return {};
        if (ta) continue;
        if (a.cells[t] == b.cells[t]) continue;
        if (m.has(a.cells[t]) && m.to[a.cells[t]] != b.cells[t]) return {};
        m.to[a.cells[t]] = b.cells[t];
      }
      // consistency: unchanged colors must not be remapped elsewhere
      for (size_t t = 0; t < a.cells.size(); ++t) {
        if (a.cells[t] == kTransparent) continue;
        if (m.apply(a.cells[t]) != b.cells[t]) return {};
      }
      return {{Value(m)}};
    }
    case PatternName::Index: {
      auto s0 = eval_param(P, env);
      if (!s0 || !s0->is_seq()) return {};
      int k = id.d;
      if (k < 1 || s0->depth() != v.depth() + k) return {};
      Tuples out;
      std::vector<std::int64_t> path;
      std::function<void(const Value&, int)> scan = [&](const Value& s, int rem) {
        if (rem == 0) {
          if (compare(s, v) == 0) {
            std::vector<Value> idx;
            for (auto p : path) idx.push_back(int_v(p));
            out.push_back({seq_v(1, std::move(idx))});
          }
          return;
        }
        if (!s.is_seq()) return;
        const auto& xs = s.as_seq().get();
        for (size_t t = 0; t < xs.size(); ++t) {
          path.push_back(static_cast<std::int64_t>(t));
          scan(xs[t], rem - 1);
          path.pop_back();
        }
      };
      scan(*s0, k);
      return out;
    }
  }
  return {};
}

}  // namespace

// --- lift wrappers -----------------------------------------------------

std::optional<Value> compose(const PatternInstance& P, const Environment& env,
                             const std::vector<Value>& parts,
                             const Distribution* whole_dist) {
  if (static_cast<int>(parts.size()) != arity(P.id))
    throw std::invalid_argument("compose: arity mismatch for " + pattern_name(P.id));
  if (P.lift == 0) return compose_scalar(P, env, parts, whole_dist);

  const SeqShape* sh = nullptr;
  DistPtr item_dist;
  if (whole_dist) {
    if (auto* s = whole_dist->get<SeqDist>()) {
      sh = s->shape ? &*s->shape : nullptr;
      item_dist = s->item;
    }
  }

  // Item-wise composition over the top sequence layer; the layer length
  // comes from the parts, or from the shape context for 0-ary patterns.
  size_t len = 0;
  if (parts.empty()) {
    if (!sh) return std::nullopt;
    len = static_cast<size_t>(sh->len);
  } else {
    bool first = true;
    for (const Value& p : parts) {
      if (!p.is_seq()) return std::nullopt;
      if (first) {
        len = p.as_seq().len();
        first = false;
      } else if (p.as_seq().len() != len) {
        return std::nullopt;
      }
    }
  }
  PatternInstance inner = P;
  inner.lift -= 1;
  std::vector<Value> items;
  for (size_t t = 0; t < len; ++t) {
    std::vector<Value> sub;
    for (const Value& p : parts) sub.push_back(p.as_seq().get()[t]);
    std::optional<Distribution> item_ctx;
    if (item_dist && whole_dist->depth() >= 1) {
      int item_seq_depth = whole_dist->depth() - 1;
      if (item_seq_depth >= 1) {
        SeqDist sd;
        sd.depth = item_seq_depth;
        sd.item = item_dist;
        if (sh && t < sh->kids.size()) sd.shape = sh->kids[t];
        item_ctx = Distribution(sd);
      } else {
        item_ctx = *item_dist;
      }
    }
    auto r = compose(inner, env, sub, item_ctx ? &*item_ctx : nullptr);
    if (!r) return std::nullopt;
    items.push_back(std::move(*r));
  }
  int item_depth = items.empty() ? std::max(0, P.lift - 1) : items[0].depth();
  for (const Value& x : items)
    if (x.depth() != item_depth) return std::nullopt;
  return seq_v(item_depth + 1, std::move(items));
}

Stream<std::vector<Value>> decompose(const PatternInstance& P, const Environment& env,
                                     const Value& v) {
  if (P.lift == 0) {
    auto tuples = decompose_scalar_list(P, env, v);
    // Arity sanity: every tuple matches the declared arity.
    return Stream<std::vector<Value>>::of(std::move(tuples));
  }
  if (!v.is_seq()) return Stream<std::vector<Value>>::empty();
  const auto& items = v.as_seq().get();
  PatternInstance inner = P;
  inner.lift -= 1;
  int ar = arity(P.id);
  if (items.empty()) {
    // The empty sequence decomposes into empty part sequences.
    std::vector<Value> parts;
    for (int i = 0; i < ar; ++i) parts.push_back(seq_v(std::max(1, P.lift), std::vector<Value>{}));
    return Stream<std::vector<Value>>::of({std::move(parts)});
  }
  std::vector<Memo<std::vector<Value>>> comps;
  for (const Value& item : items) comps.emplace_back(decompose(inner, env, item));
  // Rank-ordered product across items: promising item decompositions first.
  auto prod = sorted_product_stream<std::vector<Value>>(std::move(comps), nullptr);
  return std::move(prod).map(
      [ar](std::pair<std::vector<std::vector<Value>>, double> t) {
        std::vector<Value> parts;
        parts.reserve(ar);
        for (int i = 0; i < ar; ++i) {
          std::vector<Value> col;
          int depth = 0;
          for (const auto& tuple : t.first) {
            col.push_back(tuple[i]);
            depth = tuple[i].depth();
          }
          parts.push_back(seq_v(depth + 1, std::move(col)));
        }
        return parts;
      });
}

// --- part distributions --------------------------------------------------

bool part_needs_prior(const PatternId& id, int i) {
  switch (id.name) {
    case PatternName::BgColor: return i == 1;
    case PatternName::MotifP: return i >= 2;
    case PatternName::Objects: return i == 4;
    case PatternName::Metagrid: return i >= 3;
    case PatternName::ColorRow: case PatternName::ColorCol: case PatternName::ColorMat:
      return i == 1;
    case PatternName::DomainMap: return false;
    default: return false;
  }
}

bool prefix_viable(const PatternInstance& P, const std::vector<Value>& prior,
                   const Distribution& V) {
  if (P.lift > 0) return true;
  switch (P.id.name) {
    case PatternName::MotifP: {
      // motif + core must expand to a legal grid
      if (prior.size() >= 2) {
        if (!prior[0].is_motif() || !prior[1].is_grid()) return false;
        if (!expand_motif(prior[0].as_motif(), prior[1].as_grid())) return false;
      }
      return true;
    }
    case PatternName::Metagrid: {
      if (prior.size() >= 3) {
        if (!prior[2].is_vec()) return false;
        std::int64_t k = prior[2].as_vec().i, l = prior[2].as_vec().j;
        if (k < 1 || l < 1 || k * l < 2) return false;
        if (k + (k - 1) > kMaxSide || l + (l - 1) > kMaxSide) return false;
      }
      if (prior.size() >= 4 && prior[3].depth() == 1) {
        std::int64_t k = prior[2].as_vec().i, total = k - 1;
        for (const Value& x : prior[3].as_seq().get()) {
          if (!x.is_int() || x.as_int() < 1) return false;
          total += x.as_int();
        }
        if (total > kMaxSide) return false;
      }
      if (prior.size() >= 5 && prior[4].depth() == 1) {
        std::int64_t l = prior[2].as_vec().j, total = l - 1;
        for (const Value& x : prior[4].as_seq().get()) {
          if (!x.is_int() || x.as_int() < 1) return false;
          total += x.as_int();
        }
        if (total > kMaxSide) return false;
      }
      return true;
    }
    case PatternName::Objects: {
      if (prior.size() >= 1 && prior[0].is_vec()) {
        if (prior[0].as_vec().i < 1 || prior[0].as_vec().j < 1) return false;
        if (prior[0].as_vec().i > kMaxSide || prior[0].as_vec().j > kMaxSide) return false;
      }
      if (prior.size() >= 4 && prior[3].is_int() && prior[0].is_vec()) {
        if (prior[3].as_int() < 1 ||
            prior[3].as_int() > prior[0].as_vec().i * prior[0].as_vec().j)
          return false;
      }
      return true;
    }
    default:
      return true;
  }
  (void)V;
}

namespace {

Distribution part_distribution_scalar(const PatternInstance& P, int i, const Distribution& V,
                                      const std::vector<Value>& prior) {
  const PatternId& id = P.id;
  SizeBounds b = size_bounds(V);
  switch (id.name) {
    case PatternName::BgColor: {
      if (i == 0) return ColorDist::background();
      GridDist d = grid_dist_like(V, GridKind::Sprite);
      if (!prior.empty() && prior[0].is_color()) d.excluded = prior[0].as_color().code;
      return d;
    }
    case PatternName::Monocolor: {
      if (i == 0) return ColorDist::object();
      GridDist d = grid_dist_like(V, GridKind::Mask);
      if (id.kind == GridKind::Full) d.content = GridDist::Content::ForcedFull;
      return d;
    }
    case PatternName::MotifP: {
      if (i == 0) return MotifDist{};
      if (i == 1) return grid_dist_like(V, id.kind);
      if (i == 2) {
        if (prior.size() >= 2 && prior[0].is_motif() && prior[1].is_grid()) {
          auto pure = expand_motif(prior[0].as_motif(), prior[1].as_grid());
          if (pure) return SingletonDist{Value(std::move(*pure))};
        }
        return grid_dist_like(V, id.kind);
      }
      GridDist d;
      d.kind = noise_kind(id.kind);
      d.content = GridDist::Content::Sparse;
      if (prior.size() >= 3 && prior[2].is_grid()) {
        const Grid& pure = prior[2].as_grid();
        d.hd = IntDist::uniform(pure.h, pure.h);  // size fixed by the pure part
        d.wd = IntDist::uniform(pure.w, pure.w);
      } else {
        d.hd = IntDist::elias(b.hlo, b.hhi);
        d.wd = IntDist::elias(b.wlo, b.whi);
      }
      return d;
    }
    case PatternName::IsFull:
      return grid_dist_like(V, GridKind::Full);
    case PatternName::Empty: case PatternName::Full:
      return VecDist{IntDist::elias(b.hlo, b.hhi), IntDist::elias(b.wlo, b.whi)};
    case PatternName::Point:
      return IntDist::uniform(0, 0);  // unused: Point has no parts
    case PatternName::Segment: {
      if (i == 0) return IntDist::uniform(1, b.hhi + b.whi);
      return VecDist{IntDist::uniform(0, 1), IntDist::uniform(-1, 1)};
    }
    case PatternName::Vec: {
      if (auto* vd = V.get<VecDist>()) return i == 0 ? Distribution{vd->i} : Distribution{vd->j};
      if (auto* s = V.get<SingletonDist>(); s && s->v.is_vec())
        return i == 0 ? Distribution{IntDist::uniform(s->v.as_vec().i, s->v.as_vec().i)}
                      : Distribution{IntDist::uniform(s->v.as_vec().j, s->v.as_vec().j)};
      return IntDist::any();
    }
    case PatternName::Square: {
      if (auto* vd = V.get<VecDist>()) return vd->i;
      return IntDist::any();
    }
    case PatternName::Swap: case PatternName::Replace:
      return ColorDist::uniform_all();
    case PatternName::Objects: {
      switch (i) {
        case 0: return VecDist{IntDist::elias(b.hlo, b.hhi), IntDist::elias(b.wlo, b.whi)};
        case 1: return IntDist::uniform(0, 3);
        case 2: return IntDist::uniform(0, 2);
        case 3: return IntDist::elias(1, b.hhi * b.whi);
        default: {
          ObjDist od;
          od.pos = VecDist{IntDist::uniform(0, b.hhi - 1), IntDist::uniform(0, b.whi - 1)};
          od.sprite = GridDist::sprite(IntDist::elias(1, b.hhi), IntDist::elias(1, b.whi));
          SeqDist sd;
          sd.depth = 1;
          sd.item = Distribution::make(od);
          if (prior.size() >= 4 && prior[3].is_int())
            sd.shape = SeqShape{static_cast<int>(prior[3].as_int()), {}};
          return sd;
        }
      }
    }
    case PatternName::Metagrid: {
      switch (i) {
        case 0: return ColorDist::uniform_all();
        case 1: {
          GridDist d = GridDist::mask(IntDist::uniform(2, 2), IntDist::uniform(2, 2));
          return d;
        }
        case 2:
          return VecDist{IntDist::uniform(1, (b.hhi + 1) / 2), IntDist::uniform(1, (b.whi + 1) / 2)};
        case 3: case 4: {
          SeqDist sd;
          sd.depth = 1;
          sd.item = Distribution::make(IntDist::uniform(1, i == 3 ? b.hhi : b.whi));
          if (prior.size() >= 3 && prior[2].is_vec()) {
            std::int64_t n = i == 3 ? prior[2].as_vec().i : prior[2].as_vec().j;
            sd.shape = SeqShape{static_cast<int>(n), {}};
          }
          return sd;
        }
        default: {
          // subgrid sizes run over the observed band heights and widths
          std::int64_t hlo = 1, hhi = b.hhi, wlo = 1, whi = b.whi;
          if (prior.size() >= 5 && prior[3].depth() == 1 && prior[4].depth() == 1 &&
              prior[3].as_seq().len() > 0 && prior[4].as_seq().len() > 0) {
            hlo = hhi = prior[3].as_seq().get()[0].as_int();
            for (const Value& x : prior[3].as_seq().get()) {
              hlo = std::min(hlo, x.as_int());
              hhi = std::max(hhi, x.as_int());
            }
            wlo = whi = prior[4].as_seq().get()[0].as_int();
            for (const Value& x : prior[4].as_seq().get()) {
              wlo = std::min(wlo, x.as_int());
              whi = std::max(whi, x.as_int());
            }
          }
          SeqDist sd;
          sd.depth = 2;
          sd.item = Distribution::make(
              GridDist{id.kind, IntDist::elias(hlo, hhi), IntDist::elias(wlo, whi)});
          if (prior.size() >= 3 && prior[2].is_vec()) {
            SeqShape sh;
            sh.len = static_cast<int>(prior[2].as_vec().i);
            for (int r = 0; r < sh.len; ++r)
              sh.kids.push_back(SeqShape{static_cast<int>(prior[2].as_vec().j), {}});
            sd.shape = std::move(sh);
          }
          return sd;
        }
      }
    }
    case PatternName::ColorRow: case PatternName::ColorCol: {
      bool row = id.name == PatternName::ColorRow;
      if (i == 0) return IntDist::elias(row ? b.wlo : b.hlo, row ? b.whi : b.hhi);
      SeqDist sd;
      sd.depth = 1;
      sd.item = Distribution::make(ColorDist::uniform_all());
      if (!prior.empty() && prior[0].is_int())
        sd.shape = SeqShape{static_cast<int>(prior[0].as_int()), {}};
      return sd;
    }
    case PatternName::ColorMat: {
      if (i == 0) return VecDist{IntDist::elias(b.hlo, b.hhi), IntDist::elias(b.wlo, b.whi)};
      SeqDist sd;
      sd.depth = 2;
      sd.item = Distribution::make(ColorDist::uniform_all());
      if (!prior.empty() && prior[0].is_vec()) {
        SeqShape sh;
        sh.len = static_cast<int>(prior[0].as_vec().i);
        for (int r = 0; r < sh.len; ++r)
          sh.kids.push_back(SeqShape{static_cast<int>(prior[0].as_vec().j), {}});
        sd.shape = std::move(sh);
      }
      return sd;
    }
    case PatternName::AsGrid: {
      GridDist d = GridDist::full_grid();
      if (auto* s = V.get<SeqDist>(); s && s->shape && !s->shape->kids.empty()) {
        d.hd = IntDist::uniform(s->shape->len, s->shape->len);
        d.wd = IntDist::uniform(s->shape->kids[0].len, s->shape->kids[0].len);
      }
      return d;
    }
    case PatternName::DomainMap: {
      SeqDist sd;
      sd.depth = 1;
      sd.item = Distribution::make(ColorDist::uniform_all());
      sd.shape = SeqShape{static_cast<int>(id.color_set.size()), {}};
      return sd;
    }
    case PatternName::Range:
      return IntDist::any();
    case PatternName::ObjP: {
      if (auto* od = V.get<ObjDist>())
        return i == 0 ? Distribution{VecDist{od->pos}} : Distribution{od->sprite};
      if (i == 0) return VecDist{IntDist::uniform(0, kMaxSide - 1), IntDist::uniform(0, kMaxSide - 1)};
      return GridDist::sprite();
    }
    case PatternName::Cons: {
      auto* s = V.get<SeqDist>();
      int n = s ? s->depth : V.depth();
      DistPtr item = s ? s->item : Distribution::make(IntDist::any());
      if (i == 0) {
        if (n - 1 == 0) return *item;
        SeqDist sd;
        sd.depth = n - 1;
        sd.item = item;
        if (s && s->shape && id.d == 0 && s->shape->kids.size() > 0)
          sd.shape = s->shape->kids[0];
        return sd;
      }
      SeqDist sd;
      sd.depth = n;
      sd.item = item;
      if (s && s->shape && id.d == 0) {
        SeqShape sh = *s->shape;
        if (sh.len > 0) {
          sh.len -= 1;
          if (!sh.kids.empty()) sh.kids.erase(sh.kids.begin());
          sd.shape = std::move(sh);
        }
      }
      return sd;
    }
    case PatternName::Repeat: {
      auto* s = V.get<SeqDist>();
      int n = s ? s->depth : V.depth();
      DistPtr item = s ? s->item : Distribution::make(IntDist::any());
      if (n - 1 == 0) return *item;
      SeqDist sd;
      sd.depth = n - 1;
      sd.item = item;
      return sd;
    }
    case PatternName::Crop: {
      if (i == 0)
        return VecDist{IntDist::uniform(0, kMaxSide - 1), IntDist::uniform(0, kMaxSide - 1)};
      return VecDist{IntDist::uniform(1, kMaxSide), IntDist::uniform(1, kMaxSide)};
    }
    case PatternName::Recoloring:
      return ColorMapDist{};
    case PatternName::Index: {
      SeqDist sd;
      sd.depth = 1;
      sd.item = Distribution::make(IntDist::uniform(0, kMaxSide * kMaxSide - 1));
      sd.shape = SeqShape{id.d, {}};
      return sd;
    }
  }
  return IntDist::any();
}

}  // namespace

Distribution part_distribution(const PatternInstance& P, int i, const Distribution& V,
                               const std::vector<Value>& prior) {
  if (i < 0 || i >= arity(P.id))
    throw std::invalid_argument("part_distribution: part index out of range");
  if (P.lift == 0) return part_distribution_scalar(P, i, V, prior);

  // Item-wise: derive from the item distribution, then re-wrap. Prior-part
  // conditioning is per-item and is skipped at lift depth > 0.
  PatternInstance inner = P;
  inner.lift = 0;
  Distribution item_dist = IntDist::any();
  std::optional<SeqShape> shape;
  if (auto* s = V.get<SeqDist>()) {
    if (s->depth == P.lift) {
      item_dist = *s->item;
    } else {
      SeqDist sd;
      sd.depth = s->depth - P.lift;
      sd.item = s->item;
      item_dist = sd;
    }
    if (s->shape) shape = s->shape;  // top layers match the whole's layers
  } else if (auto* sg = V.get<SingletonDist>()) {
    // derive bounds from the singleton's leaves
    item_dist = GridDist::sprite();
    (void)sg;
  }
  Distribution scalar = part_distribution_scalar(inner, i, item_dist, {});
  SeqDist out;
  out.depth = P.lift + scalar.depth();
  out.item = scalar.get<SeqDist>() ? scalar.get<SeqDist>()->item
                                   : Distribution::make(scalar.raw());
  if (shape && scalar.depth() == 0) out.shape = shape;
  return out;
}

// --- class-level tables -----------------------------------------------

namespace {

DistClass grid_class(GridKind k) { return DistClass::scalar(Tag::Grid, k); }

std::vector<DistClass> part_classes_scalar(const PatternId& id, const DistClass& whole) {
  auto C = [](Tag t) { return DistClass::scalar(t); };
  switch (id.name) {
    case PatternName::BgColor: return {C(Tag::Color), grid_class(GridKind::Sprite)};
    case PatternName::Monocolor: return {C(Tag::Color), grid_class(GridKind::Mask)};
    case PatternName::MotifP:
      return {C(Tag::Motif), grid_class(id.kind), grid_class(id.kind),
              grid_class(noise_kind(id.kind))};
    case PatternName::IsFull: return {grid_class(GridKind::Full)};
    case PatternName::Empty: case PatternName::Full: return {C(Tag::Vec)};
    case PatternName::Point: return {};
    case PatternName::Segment: return {C(Tag::Int), C(Tag::Vec)};
    case PatternName::Vec: return {C(Tag::Int), C(Tag::Int)};
    case PatternName::Square: return {C(Tag::Int)};
    case PatternName::Swap: case PatternName::Replace: return {C(Tag::Color), C(Tag::Color)};
    case PatternName::Objects:
      return {C(Tag::Vec), C(Tag::Int), C(Tag::Int), C(Tag::Int),
              C(Tag::Obj).lifted(1)};
    case PatternName::Metagrid:
      return {C(Tag::Color), grid_class(GridKind::Mask), C(Tag::Vec),
              C(Tag::Int).lifted(1), C(Tag::Int).lifted(1), grid_class(id.kind).lifted(2)};
    case PatternName::ColorRow: case PatternName::ColorCol:
      return {C(Tag::Int), C(Tag::Color).lifted(1)};
    case PatternName::ColorMat: return {C(Tag::Vec), C(Tag::Color).lifted(2)};
    case PatternName::AsGrid: return {grid_class(GridKind::Full)};
    case PatternName::DomainMap: return {C(Tag::Color).lifted(1)};
    case PatternName::Range: return {C(Tag::Int), C(Tag::Int)};
    case PatternName::ObjP: return {C(Tag::Vec), grid_class(GridKind::Sprite)};
    case PatternName::Cons: return {whole.item(), whole};
    case PatternName::Repeat: return {whole.item()};
    case PatternName::Crop: return {C(Tag::Vec), C(Tag::Vec)};
    case PatternName::Recoloring: return {C(Tag::ColorMap)};
    case PatternName::Index: return {C(Tag::Int).lifted(1)};
  }
  return {};
}

}  // namespace

DistClass part_class(const PatternId& id, int i, const DistClass& whole, int lift) {
  DistClass inner_whole = whole;
  for (int k = 0; k < lift; ++k) inner_whole = inner_whole.item();
  auto parts = part_classes_scalar(id, inner_whole);
  DistClass c = parts.at(static_cast<size_t>(i));
  return c.lifted(lift);
}

std::vector<PatternInstance> patterns_for_class(const DistClass& c) {
  std::vector<PatternInstance> out;
  auto add = [&](PatternName n, GridKind k, int d, int lift) {
    PatternInstance p;
    p.id.name = n;
    p.id.kind = k;
    p.id.d = d;
    p.lift = lift;
    out.push_back(std::move(p));
  };

  if (c.depth == 0) {
    switch (c.tag) {
      case Tag::Grid:
        switch (c.kind) {
          case GridKind::Full:
            add(PatternName::BgColor, GridKind::Full, 0, 0);
            add(PatternName::Monocolor, GridKind::Full, 0, 0);
            add(PatternName::MotifP, GridKind::Full, 0, 0);
            add(PatternName::Metagrid, GridKind::Full, 0, 0);
            add(PatternName::ColorRow, GridKind::Full, 0, 0);
            add(PatternName::ColorCol, GridKind::Full, 0, 0);
            add(PatternName::ColorMat, GridKind::Full, 0, 0);
            break;
          case GridKind::Sprite:
            add(PatternName::IsFull, GridKind::Sprite, 0, 0);
            add(PatternName::Monocolor, GridKind::Sprite, 0, 0);
            add(PatternName::Empty, GridKind::Sprite, 0, 0);
            add(PatternName::MotifP, GridKind::Sprite, 0, 0);
            add(PatternName::Objects, GridKind::Sprite, 0, 0);
            add(PatternName::Metagrid, GridKind::Sprite, 0, 0);
            add(PatternName::ColorRow, GridKind::Sprite, 0, 0);
            add(PatternName::ColorCol, GridKind::Sprite, 0, 0);
            add(PatternName::ColorMat, GridKind::Sprite, 0, 0);
            break;
          case GridKind::Mask:
            add(PatternName::Empty, GridKind::Mask, 0, 0);
            add(PatternName::Full, GridKind::Mask, 0, 0);
            add(PatternName::Point, GridKind::Mask, 0, 0);
            add(PatternName::Segment, GridKind::Mask, 0, 0);
            add(PatternName::MotifP, GridKind::Mask, 0, 0);
            add(PatternName::Metagrid, GridKind::Mask, 0, 0);
            break;
        }
        break;
      case Tag::Vec:
        add(PatternName::Vec, GridKind::Full, 0, 0);
        add(PatternName::Square, GridKind::Full, 0, 0);
        break;
      case Tag::ColorMap:
        add(PatternName::Swap, GridKind::Full, 0, 0);
        add(PatternName::Replace, GridKind::Full, 0, 0);
        break;
      case Tag::Obj:
        add(PatternName::ObjP, GridKind::Full, 0, 0);
        break;
      default:
        break;
    }
    return out;
  }

  // Sequence classes: native sequence patterns then item-wise lifted ones.
  for (int d = 0; d < c.depth; ++d) add(PatternName::Cons, GridKind::Full, d, 0);
  for (int d = 0; d < c.depth; ++d) add(PatternName::Repeat, GridKind::Full, d, 0);
  if (c.item_tag == Tag::Int && c.depth == 1) add(PatternName::Range, GridKind::Full, 0, 0);
  if (c.item_tag == Tag::Int && c.depth > 1) add(PatternName::Range, GridKind::Full, 0, c.depth - 1);
  if (c.item_tag == Tag::Color && c.depth == 2) add(PatternName::AsGrid, GridKind::Full, 0, 0);
  DistClass item = DistClass::scalar(c.item_tag, c.item_kind);
  for (const PatternInstance& p : patterns_for_class(item)) {
    if (!liftable(p.id.name)) continue;
    PatternInstance lifted = p;
    lifted.lift = c.depth;
    out.push_back(std::move(lifted));
  }
  return out;
}

}  // namespace madil
