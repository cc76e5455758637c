#include "madil/expressions.hpp"

#include <algorithm>
#include <sstream>

namespace madil {

int static_count(Fn f) {
  switch (f) {
    case Fn::Add: case Fn::Sub: case Fn::Mul: case Fn::Div:
    case Fn::VAdd: case Fn::VSub: case Fn::VMul: case Fn::VDiv:
    case Fn::ApplySym: case Fn::CloseSym: case Fn::UnfoldSym:
    case Fn::SelfCompose: case Fn::IndexSeq:
      return 1;
    default:
      return 0;
  }
}

int natural_depth(Fn f) {
  switch (f) {
    case Fn::Length: case Fn::TailSeq: case Fn::ReverseSeq: case Fn::RotateSeq:
    case Fn::SumSeq: case Fn::MinSeq: case Fn::MaxSeq: case Fn::ArgMin:
    case Fn::ArgMax: case Fn::MostCommon: case Fn::LeastCommon:
    case Fn::IndexSeq: case Fn::AndMasks: case Fn::OrMasks: case Fn::XorMasks:
    case Fn::GridOfColorRow:
      return 1;
    case Fn::Transpose2D: case Fn::Flatten2D: case Fn::Index2D:
      return 2;
    default:
      return 0;
  }
}

namespace {

const char* base_name(Fn f) {
  switch (f) {
    case Fn::Add: return "add";
    case Fn::Sub: return "sub";
    case Fn::Mul: return "mul";
    case Fn::Div: return "div";
    case Fn::VAdd: return "vadd";
    case Fn::VSub: return "vsub";
    case Fn::VMul: return "vmul";
    case Fn::VDiv: return "vdiv";
    case Fn::CompI: return "i";
    case Fn::CompJ: return "j";
    case Fn::VSwap: return "ijTranspose";
    case Fn::Size: return "size";
    case Fn::Area: return "area";
    case Fn::ColorCount: return "colorCount";
    case Fn::MajorityColor: return "majorityColor";
    case Fn::MinorityColor: return "minorityColor";
    case Fn::HalfTop: return "halfTop";
    case Fn::HalfBottom: return "halfBottom";
    case Fn::HalfLeft: return "halfLeft";
    case Fn::HalfRight: return "halfRight";
    case Fn::QuadTL: return "quadTL";
    case Fn::QuadTR: return "quadTR";
    case Fn::QuadBL: return "quadBL";
    case Fn::QuadBR: return "quadBR";
    case Fn::ContentOf: return "content";
    case Fn::MaskOf: return "maskOfGrid";
    case Fn::NotMask: return "not";
    case Fn::Compress: return "unrepeat";
    case Fn::ApplySym: return "applySymGrid";
    case Fn::CloseSym: return "closeSym";
    case Fn::UnfoldSym: return "unfoldSym";
    case Fn::SelfCompose: return "selfCompose";
    case Fn::PosOf: return "pos";
    case Fn::SpriteOf: return "sprite";
    case Fn::TopOf: return "top";
    case Fn::BottomOf: return "bottom";
    case Fn::LeftOf: return "left";
    case Fn::RightOf: return "right";
    case Fn::MiddleRowOf: return "middleRow";
    case Fn::MiddleColOf: return "middleCol";
    case Fn::BorderOf: return "border";
    case Fn::InteriorOf: return "interior";
    case Fn::Neigh4: return "neigh4";
    case Fn::Neigh8: return "neigh8";
    case Fn::Length: return "length";
    case Fn::TailSeq: return "tail";
    case Fn::ReverseSeq: return "reverse";
    case Fn::RotateSeq: return "rotate";
    case Fn::Transpose2D: return "transpose";
    case Fn::Flatten2D: return "flatten";
    case Fn::SumSeq: return "sum";
    case Fn::MinSeq: return "min";
    case Fn::MaxSeq: return "max";
    case Fn::ArgMin: return "argmin";
    case Fn::ArgMax: return "argmax";
    case Fn::MostCommon: return "mostCommon";
    case Fn::LeastCommon: return "leastCommon";
    case Fn::IndexSeq: return "index";
    case Fn::Index2D: return "index2";
    case Fn::AndMasks: return "and";
    case Fn::OrMasks: return "or";
    case Fn::XorMasks: return "xor";
    case Fn::ColorsOf: return "colors";
    case Fn::GridOfColorRow: return "gridOfColorSeq";
  }
  return "?";
}

const char* sym_transform_name(SymTransform t) {
  switch (t) {
    case SymTransform::Identity: return "Id";
    case SymTransform::FlipH: return "FlipH";
    case SymTransform::FlipV: return "FlipV";
    case SymTransform::Rot90: return "Rot90";
    case SymTransform::Rot180: return "Rot180";
    case SymTransform::Rot270: return "Rot270";
    case SymTransform::Transpose: return "Transpose";
    case SymTransform::AntiTranspose: return "AntiTranspose";
  }
  return "?";
}

}  // namespace

std::string fn_name(const FunctionId& f) {
  std::string s = base_name(f.fn);
  return s;
}

const std::vector<FunctionId>& arc_functions() {
  static const std::vector<FunctionId> fns = [] {
    std::vector<FunctionId> v;
    for (int k = 1; k <= 3; ++k) {
      v.push_back({Fn::Add, k});
      v.push_back({Fn::Sub, k});
      v.push_back({Fn::VAdd, k});
      v.push_back({Fn::VSub, k});
    }
    for (int k = 2; k <= 3; ++k) {
      v.push_back({Fn::Mul, k});
      v.push_back({Fn::Div, k});
      v.push_back({Fn::VMul, k});
      v.push_back({Fn::VDiv, k});
    }
    for (Fn f : {Fn::CompI, Fn::CompJ, Fn::VSwap, Fn::Size, Fn::Area, Fn::ColorCount,
                 Fn::MajorityColor, Fn::MinorityColor, Fn::HalfTop, Fn::HalfBottom,
                 Fn::HalfLeft, Fn::HalfRight, Fn::QuadTL, Fn::QuadTR, Fn::QuadBL,
                 Fn::QuadBR, Fn::ContentOf, Fn::MaskOf, Fn::NotMask, Fn::Compress,
                 Fn::PosOf, Fn::SpriteOf, Fn::TopOf, Fn::BottomOf, Fn::LeftOf,
                 Fn::RightOf, Fn::MiddleRowOf, Fn::MiddleColOf, Fn::BorderOf,
                 Fn::InteriorOf, Fn::Neigh4, Fn::Neigh8, Fn::Length, Fn::TailSeq,
                 Fn::ReverseSeq, Fn::RotateSeq, Fn::Transpose2D, Fn::Flatten2D,
                 Fn::SumSeq, Fn::MinSeq, Fn::MaxSeq, Fn::ArgMin, Fn::ArgMax,
                 Fn::MostCommon, Fn::LeastCommon, Fn::Index2D, Fn::AndMasks,
                 Fn::OrMasks, Fn::XorMasks, Fn::ColorsOf, Fn::GridOfColorRow})
      v.push_back({f, 0});
    for (int s = 1; s < kNumSymTransforms; ++s) v.push_back({Fn::ApplySym, s});
    for (int s : {static_cast<int>(SymTransform::FlipH), static_cast<int>(SymTransform::FlipV),
                  static_cast<int>(SymTransform::Rot180), static_cast<int>(SymTransform::Transpose)})
      v.push_back({Fn::CloseSym, s});
    for (int s : {static_cast<int>(SymTransform::FlipH), static_cast<int>(SymTransform::FlipV),
                  static_cast<int>(SymTransform::Rot180)})
      v.push_back({Fn::UnfoldSym, s});
    for (int c = 0; c < kNumColors; ++c) v.push_back({Fn::SelfCompose, c});
    v.push_back({Fn::IndexSeq, 0});
    v.push_back({Fn::IndexSeq, -1});
    return v;
  }();
  return fns;
}

namespace {

std::optional<Value> int_result(std::int64_t n) { return int_v(n); }

std::optional<Value> grid_result(std::optional<Grid> g) {
  if (!g || !g->valid()) return std::nullopt;
  return Value(std::move(*g));
}

std::optional<Grid> remove_duplicate_lines(const Grid& g) {
  // adjacent duplicate rows, then columns
  std::vector<int> rows, cols;
  for (int i = 0; i < g.h; ++i) {
    bool dup = false;
    if (i > 0) {
      dup = true;
      for (int j = 0; j < g.w && dup; ++j) dup = g.at(i, j) == g.at(i - 1, j);
    }
    if (!dup) rows.push_back(i);
  }
  for (int j = 0; j < g.w; ++j) {
    bool dup = false;
    if (j > 0) {
      dup = true;
      for (int i = 0; i < g.h && dup; ++i) dup = g.at(i, j) == g.at(i, j - 1);
    }
    if (!dup) cols.push_back(j);
  }
  Grid out(g.kind, static_cast<int>(rows.size()), static_cast<int>(cols.size()), kTransparent);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out.at(i, j) = g.at(rows[i], cols[j]);
  return out;
}

std::optional<Grid> unfold(const Grid& g, SymTransform t) {
  switch (t) {
    case SymTransform::FlipH: {
      if (2 * g.h > kMaxSide) return std::nullopt;
      Grid out(g.kind, 2 * g.h, g.w, kTransparent);
      out = overlay(out, g, 0, 0);
      out = overlay(out, transform(g, SymTransform::FlipH), g.h, 0);
      if (g.kind == GridKind::Full) return out;
      return out;
    }
    case SymTransform::FlipV: {
      if (2 * g.w > kMaxSide) return std::nullopt;
      Grid out(g.kind, g.h, 2 * g.w, kTransparent);
      out = overlay(out, g, 0, 0);
      out = overlay(out, transform(g, SymTransform::FlipV), 0, g.w);
      return out;
    }
    case SymTransform::Rot180: {  // both axes
      if (2 * g.h > kMaxSide || 2 * g.w > kMaxSide) return std::nullopt;
      Grid out(g.kind, 2 * g.h, 2 * g.w, kTransparent);
      out = overlay(out, g, 0, 0);
      out = overlay(out, transform(g, SymTransform::FlipV), 0, g.w);
      out = overlay(out, transform(g, SymTransform::FlipH), g.h, 0);
      out = overlay(out, transform(g, SymTransform::Rot180), g.h, g.w);
      return out;
    }
    default:
      return std::nullopt;
  }
}

std::optional<Grid> self_compose(const Grid& g, std::uint8_t color) {
  std::int64_t H = std::int64_t{1} * g.h * g.h, W = std::int64_t{1} * g.w * g.w;
  if (H > kMaxSide || W > kMaxSide) return std::nullopt;
  Grid out(g.kind, static_cast<int>(H), static_cast<int>(W), kTransparent);
  for (int i = 0; i < g.h; ++i)
    for (int j = 0; j < g.w; ++j) {
      std::uint8_t c = g.at(i, j);
      for (int a = 0; a < g.h; ++a)
        for (int b = 0; b < g.w; ++b)
          out.at(i * g.h + a, j * g.w + b) = (c == color) ? g.at(a, b) : c;
    }
  return out;
}

bool border_cell(const Grid& g, int i, int j) {
  static const int d4[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (auto& d : d4) {
    int ni = i + d[0], nj = j + d[1];
    if (!g.in_bounds(ni, nj) || g.at(ni, nj) == kTransparent) return true;
  }
  return false;
}

std::optional<Value> seq_of(int depth, std::vector<Value> items) {
  return seq_v(depth, std::move(items));
}

}  // namespace

std::optional<Value> apply_function(const FunctionId& f, const Value& arg) {
  switch (f.fn) {
    case Fn::Add:
      if (!arg.is_int()) return std::nullopt;
      return int_result(arg.as_int() + f.k);
    case Fn::Sub:
      if (!arg.is_int()) return std::nullopt;
      return int_result(arg.as_int() - f.k);
    case Fn::Mul:
      if (!arg.is_int()) return std::nullopt;
      return int_result(arg.as_int() * f.k);
    case Fn::Div: {
      if (!arg.is_int() || f.k == 0) return std::nullopt;
      if (arg.as_int() % f.k != 0) return std::nullopt;
      return int_result(arg.as_int() / f.k);
    }
    case Fn::VAdd:
      if (!arg.is_vec()) return std::nullopt;
      return vec_v(arg.as_vec().i + f.k, arg.as_vec().j + f.k);
    case Fn::VSub:
      if (!arg.is_vec()) return std::nullopt;
      return vec_v(arg.as_vec().i - f.k, arg.as_vec().j - f.k);
    case Fn::VMul:
      if (!arg.is_vec()) return std::nullopt;
      return vec_v(arg.as_vec().i * f.k, arg.as_vec().j * f.k);
    case Fn::VDiv: {
      if (!arg.is_vec() || f.k == 0) return std::nullopt;
      const Vec2& v = arg.as_vec();
      if (v.i % f.k != 0 || v.j % f.k != 0) return std::nullopt;
      return vec_v(v.i / f.k, v.j / f.k);
    }
    case Fn::CompI:
      if (!arg.is_vec()) return std::nullopt;
      return int_result(arg.as_vec().i);
    case Fn::CompJ:
      if (!arg.is_vec()) return std::nullopt;
      return int_result(arg.as_vec().j);
    case Fn::VSwap:
      if (!arg.is_vec()) return std::nullopt;
      return vec_v(arg.as_vec().j, arg.as_vec().i);

    case Fn::Size:
      if (!arg.is_grid()) return std::nullopt;
      return vec_v(arg.as_grid().h, arg.as_grid().w);
    case Fn::Area:
      if (!arg.is_grid()) return std::nullopt;
      return int_result(static_cast<std::int64_t>(arg.as_grid().area()));
    case Fn::ColorCount: {
      if (!arg.is_grid()) return std::nullopt;
      return int_result(static_cast<std::int64_t>(colors_by_frequency(arg.as_grid()).size()));
    }
    case Fn::MajorityColor: {
      if (!arg.is_grid()) return std::nullopt;
      auto c = majority_color(arg.as_grid());
      if (!c) return std::nullopt;
      return color_v(*c);
    }
    case Fn::MinorityColor: {
      if (!arg.is_grid()) return std::nullopt;
      auto c = minority_color(arg.as_grid());
      if (!c) return std::nullopt;
      return color_v(*c);
    }
    case Fn::HalfTop: {
      if (!arg.is_grid() || arg.as_grid().h < 2) return std::nullopt;
      const Grid& g = arg.as_grid();
      return grid_result(crop(g, 0, 0, g.h / 2, g.w));
    }
    case Fn::HalfBottom: {
      if (!arg.is_grid() || arg.as_grid().h < 2) return std::nullopt;
      const Grid& g = arg.as_grid();
      return grid_result(crop(g, g.h - g.h / 2, 0, g.h / 2, g.w));
    }
    case Fn::HalfLeft: {
      if (!arg.is_grid() || arg.as_grid().w < 2) return std::nullopt;
      const Grid& g = arg.as_grid();
      return grid_result(crop(g, 0, 0, g.h, g.w / 2));
    }
    case Fn::HalfRight: {
      if (!arg.is_grid() || arg.as_grid().w < 2) return std::nullopt;
      const Grid& g = arg.as_grid();
      return grid_result(crop(g, 0, g.w - g.w / 2, g.h, g.w / 2));
    }
    case Fn::QuadTL: case Fn::QuadTR: case Fn::QuadBL: case Fn::QuadBR: {
      if (!arg.is_grid()) return std::nullopt;
      const Grid& g = arg.as_grid();
      if (g.h < 2 || g.w < 2) return std::nullopt;
      int hh = g.h / 2, hw = g.w / 2;
      int i0 = (f.fn == Fn::QuadBL || f.fn == Fn::QuadBR) ? g.h - hh : 0;
      int j0 = (f.fn == Fn::QuadTR || f.fn == Fn::QuadBR) ? g.w - hw : 0;
      return grid_result(crop(g, i0, j0, hh, hw));
    }
    case Fn::ContentOf: {
      if (!arg.is_grid()) return std::nullopt;
      const Grid& g = arg.as_grid();
      auto bb = content_bbox(g);
      if (!bb) return std::nullopt;
      auto sub = crop(g, (*bb)[0], (*bb)[1], (*bb)[2], (*bb)[3]);
      sub->kind = GridKind::Sprite;
      return Value(Obj{Vec2{(*bb)[0], (*bb)[1]}, std::move(*sub)});
    }
    case Fn::MaskOf: {
      if (!arg.is_grid()) return std::nullopt;
      const Grid& g = arg.as_grid();
      Grid m(GridKind::Mask, g.h, g.w, kTransparent);
      for (size_t k = 0; k < g.cells.size(); ++k)
        if (g.cells[k] != kTransparent) m.cells[k] = kBlack;
      return Value(std::move(m));
    }
    case Fn::NotMask: {
      if (!arg.is_grid() || arg.as_grid().kind != GridKind::Mask) return std::nullopt;
      Grid m = arg.as_grid();
      for (auto& c : m.cells) c = (c == kTransparent) ? kBlack : kTransparent;
      return Value(std::move(m));
    }
    case Fn::Compress:
      if (!arg.is_grid()) return std::nullopt;
      return grid_result(remove_duplicate_lines(arg.as_grid()));
    case Fn::ApplySym: {
      if (!arg.is_grid()) return std::nullopt;
      return grid_result(transform(arg.as_grid(), static_cast<SymTransform>(f.k)));
    }
    case Fn::CloseSym: {
      if (!arg.is_grid()) return std::nullopt;
      const Grid& g = arg.as_grid();
      Grid img = transform(g, static_cast<SymTransform>(f.k));
      if (img.h != g.h || img.w != g.w) return std::nullopt;
      return Value(overlay(g, img));
    }
    case Fn::UnfoldSym:
      if (!arg.is_grid()) return std::nullopt;
      return grid_result(unfold(arg.as_grid(), static_cast<SymTransform>(f.k)));
    case Fn::SelfCompose:
      if (!arg.is_grid() || arg.as_grid().kind != GridKind::Full) return std::nullopt;
      return grid_result(self_compose(arg.as_grid(), static_cast<std::uint8_t>(f.k)));

    case Fn::PosOf:
      if (!arg.is_obj()) return std::nullopt;
      return Value(arg.as_obj().pos);
    case Fn::SpriteOf:
      if (!arg.is_obj()) return std::nullopt;
      return Value(arg.as_obj().sprite);
    case Fn::TopOf:
      if (!arg.is_obj()) return std::nullopt;
      return int_result(arg.as_obj().pos.i);
    case Fn::BottomOf:
      if (!arg.is_obj()) return std::nullopt;
      return int_result(arg.as_obj().pos.i + arg.as_obj().sprite.h - 1);
    case Fn::LeftOf:
      if (!arg.is_obj()) return std::nullopt;
      return int_result(arg.as_obj().pos.j);
    case Fn::RightOf:
      if (!arg.is_obj()) return std::nullopt;
      return int_result(arg.as_obj().pos.j + arg.as_obj().sprite.w - 1);
    case Fn::MiddleRowOf:
      if (!arg.is_obj()) return std::nullopt;
      return int_result(arg.as_obj().pos.i + (arg.as_obj().sprite.h - 1) / 2);
    case Fn::MiddleColOf:
      if (!arg.is_obj()) return std::nullopt;
      return int_result(arg.as_obj().pos.j + (arg.as_obj().sprite.w - 1) / 2);

    case Fn::BorderOf: {
      if (!arg.is_grid() || arg.as_grid().kind == GridKind::Full) return std::nullopt;
      Grid g = arg.as_grid();
      Grid out = g;
      for (int i = 0; i < g.h; ++i)
        for (int j = 0; j < g.w; ++j)
          if (g.at(i, j) != kTransparent && !border_cell(g, i, j))
            out.at(i, j) = kTransparent;
      return Value(std::move(out));
    }
    case Fn::InteriorOf: {
      if (!arg.is_grid() || arg.as_grid().kind == GridKind::Full) return std::nullopt;
      Grid g = arg.as_grid();
      Grid out = g;
      for (int i = 0; i < g.h; ++i)
        for (int j = 0; j < g.w; ++j)
          if (g.at(i, j) != kTransparent && border_cell(g, i, j))
            out.at(i, j) = kTransparent;
      return Value(std::move(out));
    }
    case Fn::Neigh4: case Fn::Neigh8: {
      if (!arg.is_grid() || arg.as_grid().kind != GridKind::Mask) return std::nullopt;
      const Grid& g = arg.as_grid();
      Grid out(GridKind::Mask, g.h, g.w, kTransparent);
      bool diag = f.fn == Fn::Neigh8;
      for (int i = 0; i < g.h; ++i)
        for (int j = 0; j < g.w; ++j) {
          if (g.at(i, j) != kTransparent) continue;
          bool nb = false;
          for (int di = -1; di <= 1 && !nb; ++di)
            for (int dj = -1; dj <= 1 && !nb; ++dj) {
              if (di == 0 && dj == 0) continue;
              if (!diag && di != 0 && dj != 0) continue;
              if (g.in_bounds(i + di, j + dj) && g.at(i + di, j + dj) != kTransparent)
                nb = true;
            }
          if (nb) out.at(i, j) = kBlack;
        }
      return Value(std::move(out));
    }

    case Fn::Length:
      if (arg.depth() < 1) return std::nullopt;
      return int_result(static_cast<std::int64_t>(arg.as_seq().len()));
    case Fn::TailSeq: {
      if (arg.depth() < 1 || arg.as_seq().len() == 0) return std::nullopt;
      auto items = arg.as_seq().get();
      return seq_of(arg.depth(), {items.begin() + 1, items.end()});
    }
    case Fn::ReverseSeq: {
      if (arg.depth() < 1) return std::nullopt;
      auto items = arg.as_seq().get();
      std::reverse(items.begin(), items.end());
      return seq_of(arg.depth(), std::move(items));
    }
    case Fn::RotateSeq: {
      if (arg.depth() < 1 || arg.as_seq().len() == 0) return std::nullopt;
      auto items = arg.as_seq().get();
      std::rotate(items.begin(), items.begin() + 1, items.end());
      return seq_of(arg.depth(), std::move(items));
    }
    case Fn::Transpose2D: {
      if (arg.depth() != 2) return std::nullopt;
      const auto& rows = arg.as_seq().get();
      if (rows.empty()) return std::nullopt;
      size_t w = rows[0].as_seq().len();
      for (const auto& r : rows)
        if (r.as_seq().len() != w) return std::nullopt;
      std::vector<Value> cols;
      for (size_t j = 0; j < w; ++j) {
        std::vector<Value> col;
        for (const auto& r : rows) col.push_back(r.as_seq().get()[j]);
        cols.push_back(seq_v(1, std::move(col)));
      }
      return seq_of(2, std::move(cols));
    }
    case Fn::Flatten2D: {
      if (arg.depth() != 2) return std::nullopt;
      std::vector<Value> flat;
      for (const auto& r : arg.as_seq().get())
        for (const auto& x : r.as_seq().get()) flat.push_back(x);
      return seq_of(1, std::move(flat));
    }
    case Fn::SumSeq: {
      if (arg.depth() != 1) return std::nullopt;
      std::int64_t s = 0;
      for (const auto& x : arg.as_seq().get()) {
        if (!x.is_int()) return std::nullopt;
        s += x.as_int();
      }
      return int_result(s);
    }
    case Fn::MinSeq: case Fn::MaxSeq: {
      if (arg.depth() != 1 || arg.as_seq().len() == 0) return std::nullopt;
      std::optional<std::int64_t> best;
      for (const auto& x : arg.as_seq().get()) {
        if (!x.is_int()) return std::nullopt;
        if (!best || (f.fn == Fn::MinSeq ? x.as_int() < *best : x.as_int() > *best))
          best = x.as_int();
      }
      return int_result(*best);
    }
    case Fn::ArgMin: case Fn::ArgMax: {
      if (arg.depth() != 1 || arg.as_seq().len() == 0) return std::nullopt;
      const auto& xs = arg.as_seq().get();
      size_t best = 0;
      for (size_t k = 1; k < xs.size(); ++k) {
        if (!xs[k].is_int() || !xs[best].is_int()) return std::nullopt;
        bool better = f.fn == Fn::ArgMin ? xs[k].as_int() < xs[best].as_int()
                                         : xs[k].as_int() > xs[best].as_int();
        if (better) best = k;
      }
      return int_result(static_cast<std::int64_t>(best));
    }
    case Fn::MostCommon: case Fn::LeastCommon: {
      if (arg.depth() != 1 || arg.as_seq().len() == 0) return std::nullopt;
      std::map<Value, int, ValueLess> counts;
      for (const auto& x : arg.as_seq().get()) ++counts[x];
      auto best = counts.begin();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        bool better = f.fn == Fn::MostCommon ? it->second > best->second
                                             : it->second < best->second;
        if (better) best = it;
      }
      return best->first;
    }
    case Fn::IndexSeq: {
      if (arg.depth() < 1 || arg.as_seq().len() == 0) return std::nullopt;
      const auto& xs = arg.as_seq().get();
      return f.k >= 0 ? xs.front() : xs.back();
    }
    case Fn::Index2D: {
      if (arg.depth() != 2 || arg.as_seq().len() == 0) return std::nullopt;
      const auto& row = arg.as_seq().get()[0];
      if (row.as_seq().len() == 0) return std::nullopt;
      return row.as_seq().get()[0];
    }
    case Fn::AndMasks: case Fn::OrMasks: case Fn::XorMasks: {
      if (arg.depth() != 1 || arg.as_seq().len() == 0) return std::nullopt;
      const auto& xs = arg.as_seq().get();
      if (!xs[0].is_grid() || xs[0].as_grid().kind != GridKind::Mask) return std::nullopt;
      Grid acc = xs[0].as_grid();
      for (size_t k = 1; k < xs.size(); ++k) {
        if (!xs[k].is_grid()) return std::nullopt;
        const Grid& g = xs[k].as_grid();
        if (g.kind != GridKind::Mask || g.h != acc.h || g.w != acc.w) return std::nullopt;
        for (size_t t = 0; t < acc.cells.size(); ++t) {
          bool a = acc.cells[t] != kTransparent, b = g.cells[t] != kTransparent;
          bool r = f.fn == Fn::AndMasks ? (a && b) : f.fn == Fn::OrMasks ? (a || b) : (a != b);
          acc.cells[t] = r ? kBlack : kTransparent;
        }
      }
      return Value(std::move(acc));
    }
    case Fn::ColorsOf: {
      if (!arg.is_grid()) return std::nullopt;
      std::vector<Value> cs;
      for (auto c : colors_by_frequency(arg.as_grid())) cs.push_back(color_v(c));
      return seq_of(1, std::move(cs));
    }
    case Fn::GridOfColorRow: {
      if (arg.depth() != 1 || arg.as_seq().len() == 0) return std::nullopt;
      const auto& xs = arg.as_seq().get();
      Grid g(GridKind::Full, 1, static_cast<int>(xs.size()), 0);
      for (size_t k = 0; k < xs.size(); ++k) {
        if (!xs[k].is_color()) return std::nullopt;
        g.cells[k] = xs[k].as_color().code;
      }
      return grid_result(std::move(g));
    }
  }
  return std::nullopt;
}

namespace {

// Natural depth of the result, for computing the depth of mapped outputs.
int result_natural_depth(Fn f) {
  switch (f) {
    case Fn::TailSeq: case Fn::ReverseSeq: case Fn::RotateSeq: case Fn::ColorsOf:
    case Fn::Flatten2D:
      return 1;
    case Fn::Transpose2D:
      return 2;
    default:
      return 0;
  }
}

}  // namespace

std::optional<Value> apply_lifted(const FunctionId& f, const Value& arg) {
  if (arg.depth() > natural_depth(f.fn)) {
    std::vector<Value> out;
    int result_depth = arg.depth() - 1 - natural_depth(f.fn) + result_natural_depth(f.fn);
    for (const Value& x : arg.as_seq().get()) {
      auto r = apply_lifted(f, x);
      if (!r) return std::nullopt;
      if (r->depth() != result_depth) return std::nullopt;
      out.push_back(std::move(*r));
    }
    return seq_v(result_depth + 1, std::move(out));
  }
  return apply_function(f, arg);
}

// --- Expressions -------------------------------------------------------

ExprPtr Expression::constant(Value v) {
  auto e = std::make_shared<Expression>();
  e->node = std::move(v);
  return e;
}

ExprPtr Expression::var(VarId x) {
  auto e = std::make_shared<Expression>();
  e->node = x;
  return e;
}

ExprPtr Expression::app(FunctionId f, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expression>();
  e->node = App{f, std::move(args)};
  return e;
}

int size(const Expression& e) {
  if (e.is_const() || e.is_var()) return 1;
  const auto& app = std::get<Expression::App>(e.node);
  int n = 1 + static_count(app.fn.fn);
  for (const auto& a : app.args) n += size(*a);
  return n;
}

std::vector<VarId> free_vars(const Expression& e) {
  std::vector<VarId> out;
  std::function<void(const Expression&)> rec = [&](const Expression& x) {
    if (x.is_var()) {
      VarId v = std::get<VarId>(x.node);
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    } else if (x.is_app()) {
      for (const auto& a : std::get<Expression::App>(x.node).args) rec(*a);
    }
  };
  rec(e);
  return out;
}

std::optional<Value> eval(const Expression& e, const Environment& env) {
  if (e.is_const()) return std::get<Value>(e.node);
  if (e.is_var()) return env.lookup(std::get<VarId>(e.node));
  const auto& app = std::get<Expression::App>(e.node);
  if (app.args.size() != 1) return std::nullopt;
  auto arg = eval(*app.args[0], env);
  if (!arg) return std::nullopt;
  return apply_lifted(app.fn, *arg);
}

std::string to_string(const Expression& e, const VarNamer& namer) {
  std::ostringstream os;
  std::function<void(const Expression&)> rec = [&](const Expression& x) {
    if (x.is_const()) {
      os << to_string(std::get<Value>(x.node));
    } else if (x.is_var()) {
      VarId v = std::get<VarId>(x.node);
      os << (namer ? namer(v) : "x" + std::to_string(v));
    } else {
      const auto& app = std::get<Expression::App>(x.node);
      os << fn_name(app.fn) << '(';
      for (size_t k = 0; k < app.args.size(); ++k) {
        if (k) os << ", ";
        rec(*app.args[k]);
      }
      // static constants printed as trailing arguments
      switch (app.fn.fn) {
        case Fn::Add: case Fn::Sub: case Fn::Mul: case Fn::Div:
        case Fn::VAdd: case Fn::VSub: case Fn::VMul: case Fn::VDiv:
        case Fn::IndexSeq:
          os << ", " << app.fn.k;
          break;
        case Fn::ApplySym: case Fn::CloseSym: case Fn::UnfoldSym:
          os << ", " << sym_transform_name(static_cast<SymTransform>(app.fn.k));
          break;
        case Fn::SelfCompose:
          os << ", c" << app.fn.k;
          break;
        default:
          break;
      }
      os << ')';
    }
  };
  rec(e);
  return os.str();
}

bool equal(const Expression& a, const Expression& b) {
  if (a.node.index() != b.node.index()) return false;
  if (a.is_const()) return std::get<Value>(a.node) == std::get<Value>(b.node);
  if (a.is_var()) return std::get<VarId>(a.node) == std::get<VarId>(b.node);
  const auto& x = std::get<Expression::App>(a.node);
  const auto& y = std::get<Expression::App>(b.node);
  if (!(x.fn == y.fn) || x.args.size() != y.args.size()) return false;
  for (size_t k = 0; k < x.args.size(); ++k)
    if (!equal(*x.args[k], *y.args[k])) return false;
  return true;
}

// --- ExprDAG ----------------------------------------------------------

bool ExprDAG::VecLess::operator()(const std::vector<Value>& a,
                                  const std::vector<Value>& b) const {
  size_t n = std::min(a.size(), b.size());
  for (size_t k = 0; k < n; ++k)
    if (int c = compare(a[k], b[k])) return c < 0;
  return a.size() < b.size();
}

ExprDAG ExprDAG::build(const std::vector<Environment>& envs,
                       const std::vector<VarId>& vars, int max_size, int max_nodes) {
  ExprDAG dag;
  dag.n_examples_ = envs.size();
  if (envs.empty()) return dag;

  auto add_node = [&](ExprPtr e, int sz, std::vector<Value> values) -> bool {
    if (static_cast<int>(dag.nodes_.size()) >= max_nodes) {
      dag.truncated_ = true;
      return false;
    }
    auto it = dag.index_.find(values);
    if (it != dag.index_.end()) return true;  // smaller expression already indexed
    dag.index_[values].push_back(dag.nodes_.size());
    dag.nodes_.push_back(Node{std::move(e), sz, std::move(values)});
    return true;
  };

  // Size-1 layer: variables.
  for (VarId x : vars) {
    std::vector<Value> vals;
    bool ok = true;
    for (const auto& env : envs) {
      auto v = env.lookup(x);
      if (!v) { ok = false; break; }
      vals.push_back(std::move(*v));
    }
    if (ok && !add_node(Expression::var(x), 1, std::move(vals))) return dag;
  }

  // Larger sizes: one function application over an existing node.
  for (int s = 2; s <= max_size; ++s) {
    size_t existing = dag.nodes_.size();
    for (const FunctionId& f : arc_functions()) {
      int need = s - 1 - static_count(f.fn);
      if (need < 1) continue;
      for (size_t n = 0; n < existing; ++n) {
        if (dag.nodes_[n].size != need) continue;
        std::vector<Value> vals;
        bool ok = true;
        for (const Value& v : dag.nodes_[n].values) {
          auto r = apply_lifted(f, v);
          if (!r) { ok = false; break; }
          vals.push_back(std::move(*r));
        }
        if (!ok) continue;
        if (!add_node(Expression::app(f, {dag.nodes_[n].expr}), s, std::move(vals)))
          return dag;
      }
    }
  }
  return dag;
}

std::vector<ExprPtr> ExprDAG::lookup(const std::vector<Value>& target) const {
  auto it = index_.find(target);
  if (it == index_.end()) return {};
  std::vector<ExprPtr> out;
  for (size_t n : it->second) out.push_back(nodes_[n].expr);
  std::stable_sort(out.begin(), out.end(), [](const ExprPtr& a, const ExprPtr& b) {
    return size(*a) < size(*b);
  });
  return out;
}

}  // namespace madil
