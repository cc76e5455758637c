#include "madil/values.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace madil {

const char* grid_kind_name(GridKind k) {
  switch (k) {
    case GridKind::Full: return "Full";
    case GridKind::Sprite: return "Sprite";
    case GridKind::Mask: return "Mask";
  }
  return "?";
}

Grid::Grid(GridKind k, int hh, int ww, std::uint8_t fill)
    : kind(k), h(hh), w(ww), cells(static_cast<size_t>(hh) * ww, fill) {}

bool Grid::valid() const {
  if (h < 1 || w < 1 || h > kMaxSide || w > kMaxSide) return false;
  if (cells.size() != static_cast<size_t>(h) * w) return false;
  for (std::uint8_t c : cells) {
    if (c > kTransparent) return false;
    if (kind == GridKind::Full && c == kTransparent) return false;
    if (kind == GridKind::Mask && c != kBlack && c != kTransparent) return false;
  }
  return true;
}

int ColorMap::domain_size() const {
  int n = 0;
  for (auto c : to) n += (c != kAbsent);
  return n;
}

Motif Motif::symmetry(SymGroup g, bool si, bool sj) {
  Motif m;
  m.family = Family::Symmetry;
  m.group = g;
  m.share_i = si;
  m.share_j = sj;
  return m;
}

Motif Motif::periodic(int h, int w) {
  Motif m;
  m.family = Family::Periodic;
  m.h = h;
  m.w = w;
  return m;
}

Motif Motif::templ(Shape s, int h, int w) {
  Motif m;
  m.family = Family::Template;
  m.shape = s;
  m.h = h;
  m.w = w;
  return m;
}

const char* sym_group_name(Motif::SymGroup g) {
  switch (g) {
    case Motif::SymGroup::H: return "SymH";
    case Motif::SymGroup::V: return "SymV";
    case Motif::SymGroup::D: return "SymD";
    case Motif::SymGroup::A: return "SymA";
    case Motif::SymGroup::Rot180: return "SymRot180";
    case Motif::SymGroup::Rot90: return "SymRot90";
    case Motif::SymGroup::HV: return "SymHV";
    case Motif::SymGroup::Dihedral: return "SymFull";
  }
  return "?";
}

const char* shape_name(Motif::Shape s) {
  switch (s) {
    case Motif::Shape::Rectangle: return "Rectangle";
    case Motif::Shape::Cross: return "Cross";
    case Motif::Shape::Border: return "Border";
  }
  return "?";
}

Seq::Seq(int d, std::vector<Value> xs)
    : depth(d), items(std::make_shared<const std::vector<Value>>(std::move(xs))) {}

const std::vector<Value>& Seq::get() const {
  static const std::vector<Value> empty;
  return items ? *items : empty;
}

size_t Seq::len() const { return items ? items->size() : 0; }

bool Seq::operator==(const Seq& o) const {
  if (depth != o.depth || len() != o.len()) return false;
  for (size_t k = 0; k < len(); ++k)
    if (!(get()[k] == o.get()[k])) return false;
  return true;
}

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::Int: return "Int";
    case Tag::Color: return "Color";
    case Tag::Vec: return "Vec";
    case Tag::Grid: return "Grid";
    case Tag::Obj: return "Obj";
    case Tag::ColorMap: return "ColorMap";
    case Tag::Motif: return "Motif";
    case Tag::Seq: return "Seq";
  }
  return "?";
}

bool Value::operator==(const Value& o) const { return compare(*this, o) == 0; }

namespace {

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare_grid(const Grid& a, const Grid& b) {
  if (int c = cmp3(static_cast<int>(a.kind), static_cast<int>(b.kind))) return c;
  if (int c = cmp3(a.h, b.h)) return c;
  if (int c = cmp3(a.w, b.w)) return c;
  for (size_t k = 0; k < a.cells.size(); ++k)
    if (int c = cmp3(a.cells[k], b.cells[k])) return c;
  return 0;
}

int compare_motif(const Motif& a, const Motif& b) {
  if (int c = cmp3(static_cast<int>(a.family), static_cast<int>(b.family))) return c;
  switch (a.family) {
    case Motif::Family::Symmetry:
      if (int c = cmp3(static_cast<int>(a.group), static_cast<int>(b.group))) return c;
      if (int c = cmp3(a.share_i, b.share_i)) return c;
      return cmp3(a.share_j, b.share_j);
    case Motif::Family::Periodic:
      if (int c = cmp3(a.h, b.h)) return c;
      return cmp3(a.w, b.w);
    case Motif::Family::Template:
      if (int c = cmp3(static_cast<int>(a.shape), static_cast<int>(b.shape))) return c;
      if (int c = cmp3(a.h, b.h)) return c;
      return cmp3(a.w, b.w);
  }
  return 0;
}

}  // namespace

int compare(const Value& a, const Value& b) {
  if (int c = cmp3(static_cast<int>(a.tag()), static_cast<int>(b.tag()))) return c;
  switch (a.tag()) {
    case Tag::Int:
      return cmp3(a.as_int(), b.as_int());
    case Tag::Color:
      return cmp3(a.as_color().code, b.as_color().code);
    case Tag::Vec: {
      if (int c = cmp3(a.as_vec().i, b.as_vec().i)) return c;
      return cmp3(a.as_vec().j, b.as_vec().j);
    }
    case Tag::Grid:
      return compare_grid(a.as_grid(), b.as_grid());
    case Tag::Obj: {
      const Obj& x = a.as_obj();
      const Obj& y = b.as_obj();
      if (int c = cmp3(x.pos.i, y.pos.i)) return c;
      if (int c = cmp3(x.pos.j, y.pos.j)) return c;
      return compare_grid(x.sprite, y.sprite);
    }
    case Tag::ColorMap: {
      const auto& x = a.as_colormap().to;
      const auto& y = b.as_colormap().to;
      for (int k = 0; k < kNumColors; ++k)
        if (int c = cmp3(x[k], y[k])) return c;
      return 0;
    }
    case Tag::Motif:
      return compare_motif(a.as_motif(), b.as_motif());
    case Tag::Seq: {
      const Seq& x = a.as_seq();
      const Seq& y = b.as_seq();
      if (int c = cmp3(x.depth, y.depth)) return c;
      size_t n = std::min(x.len(), y.len());
      for (size_t k = 0; k < n; ++k)
        if (int c = compare(x.get()[k], y.get()[k])) return c;
      return cmp3(x.len(), y.len());
    }
  }
  return 0;
}

double elias_dl(std::int64_t n) {
  if (n < 1) throw std::domain_error("elias_dl: argument must be >= 1");
  return 2.0 * std::log2(static_cast<double>(n)) + 1.0;
}

std::string to_string(const Grid& g) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < g.h; ++i) {
    if (i) os << ',';
    os << '[';
    for (int j = 0; j < g.w; ++j) {
      if (j) os << ',';
      if (g.at(i, j) == kTransparent)
        os << '.';
      else
        os << int(g.at(i, j));
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

std::string to_string(const Motif& m) {
  std::ostringstream os;
  switch (m.family) {
    case Motif::Family::Symmetry:
      os << sym_group_name(m.group);
      if (m.share_i || m.share_j) os << '_' << int(m.share_i) << int(m.share_j);
      break;
    case Motif::Family::Periodic:
      os << "Periodic(" << m.h << 'x' << m.w << ')';
      break;
    case Motif::Family::Template:
      os << shape_name(m.shape) << '(' << m.h << 'x' << m.w << ')';
      break;
  }
  return os.str();
}

std::string to_string(const Value& v) {
  std::ostringstream os;
  switch (v.tag()) {
    case Tag::Int:
      os << v.as_int();
      break;
    case Tag::Color:
      os << 'c' << int(v.as_color().code);
      break;
    case Tag::Vec:
      os << '(' << v.as_vec().i << ',' << v.as_vec().j << ')';
      break;
    case Tag::Grid:
      os << to_string(v.as_grid());
      break;
    case Tag::Obj:
      os << "Obj((" << v.as_obj().pos.i << ',' << v.as_obj().pos.j << "),"
         << to_string(v.as_obj().sprite) << ')';
      break;
    case Tag::ColorMap: {
      os << "{";
      bool first = true;
      for (int c = 0; c < kNumColors; ++c) {
        if (!v.as_colormap().has(c)) continue;
        if (!first) os << ',';
        first = false;
        os << c << "->" << int(v.as_colormap().to[c]);
      }
      os << '}';
      break;
    }
    case Tag::Motif:
      os << to_string(v.as_motif());
      break;
    case Tag::Seq: {
      os << '[';
      const auto& xs = v.as_seq().get();
      for (size_t k = 0; k < xs.size(); ++k) {
        if (k) os << ',';
        os << to_string(xs[k]);
      }
      os << ']';
      break;
    }
  }
  return os.str();
}

Value seq_v(int depth, std::vector<Value> items) { return Value(Seq(depth, std::move(items))); }

Grid make_grid(GridKind kind, const std::vector<std::vector<int>>& rows) {
  int h = static_cast<int>(rows.size());
  int w = h ? static_cast<int>(rows[0].size()) : 0;
  Grid g(kind, h, w, kTransparent);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) g.at(i, j) = static_cast<std::uint8_t>(rows[i][j]);
  return g;
}

}  // namespace madil
