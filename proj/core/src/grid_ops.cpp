#include "madil/grid_ops.hpp"

#include <algorithm>
#include <queue>

namespace madil {

Grid transform(const Grid& g, SymTransform t) {
  int h = g.h, w = g.w;
  bool swap = (t == SymTransform::Rot90 || t == SymTransform::Rot270 ||
               t == SymTransform::Transpose || t == SymTransform::AntiTranspose);
  Grid out(g.kind, swap ? w : h, swap ? h : w, kTransparent);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      int oi = i, oj = j;
      switch (t) {
        case SymTransform::Identity: break;
        case SymTransform::FlipH: oi = h - 1 - i; break;
        case SymTransform::FlipV: oj = w - 1 - j; break;
        case SymTransform::Rot90: oi = w - 1 - j; oj = i; break;
        case SymTransform::Rot180: oi = h - 1 - i; oj = w - 1 - j; break;
        case SymTransform::Rot270: oi = j; oj = h - 1 - i; break;
        case SymTransform::Transpose: oi = j; oj = i; break;
        case SymTransform::AntiTranspose: oi = w - 1 - j; oj = h - 1 - i; break;
      }
      out.at(oi, oj) = g.at(i, j);
    }
  }
  return out;
}

std::optional<Grid> crop(const Grid& g, int i0, int j0, int h, int w) {
  if (h < 1 || w < 1 || i0 < 0 || j0 < 0 || i0 + h > g.h || j0 + w > g.w)
    return std::nullopt;
  Grid out(g.kind, h, w, kTransparent);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) out.at(i, j) = g.at(i0 + i, j0 + j);
  return out;
}

Grid overlay(const Grid& base, const Grid& top, int oi, int oj) {
  Grid out = base;
  for (int i = 0; i < top.h; ++i) {
    for (int j = 0; j < top.w; ++j) {
      std::uint8_t c = top.at(i, j);
      if (c == kTransparent) continue;
      if (out.in_bounds(oi + i, oj + j)) out.at(oi + i, oj + j) = c;
    }
  }
  return out;
}

std::array<int, kTransparent + 1> cell_counts(const Grid& g) {
  std::array<int, kTransparent + 1> n{};
  for (auto c : g.cells) ++n[c];
  return n;
}

std::vector<std::uint8_t> colors_by_frequency(const Grid& g) {
  auto n = cell_counts(g);
  std::vector<std::uint8_t> cs;
  for (std::uint8_t c = 0; c < kNumColors; ++c)
    if (n[c] > 0) cs.push_back(c);
  std::stable_sort(cs.begin(), cs.end(),
                   [&](std::uint8_t a, std::uint8_t b) { return n[a] > n[b]; });
  return cs;
}

int count_nontransparent(const Grid& g) {
  int n = 0;
  for (auto c : g.cells) n += (c != kTransparent);
  return n;
}

std::optional<std::uint8_t> majority_color(const Grid& g) {
  auto cs = colors_by_frequency(g);
  if (cs.empty()) return std::nullopt;
  return cs.front();
}

std::optional<std::uint8_t> minority_color(const Grid& g) {
  auto cs = colors_by_frequency(g);
  if (cs.empty()) return std::nullopt;
  return cs.back();
}

std::optional<std::array<int, 4>> content_bbox(const Grid& g) {
  int i0 = g.h, j0 = g.w, i1 = -1, j1 = -1;
  for (int i = 0; i < g.h; ++i)
    for (int j = 0; j < g.w; ++j)
      if (g.at(i, j) != kTransparent) {
        i0 = std::min(i0, i); j0 = std::min(j0, j);
        i1 = std::max(i1, i); j1 = std::max(j1, j);
      }
  if (i1 < 0) return std::nullopt;
  return std::array<int, 4>{i0, j0, i1 - i0 + 1, j1 - j0 + 1};
}

std::vector<Component> components(const Grid& g, bool diag, bool same_color) {
  std::vector<char> seen(g.area(), 0);
  std::vector<Component> out;
  static const int d4[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  static const int d8[8][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                               {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  const auto* dirs = diag ? d8 : d4;
  int ndirs = diag ? 8 : 4;

  for (int si = 0; si < g.h; ++si) {
    for (int sj = 0; sj < g.w; ++sj) {
      if (seen[si * g.w + sj] || g.at(si, sj) == kTransparent) continue;
      Component comp;
      comp.i0 = comp.i1 = si;
      comp.j0 = comp.j1 = sj;
      std::uint8_t col = g.at(si, sj);
      std::queue<std::pair<int, int>> q;
      q.push({si, sj});
      seen[si * g.w + sj] = 1;
      while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        comp.cells.push_back({i, j});
        comp.i0 = std::min(comp.i0, i); comp.i1 = std::max(comp.i1, i);
        comp.j0 = std::min(comp.j0, j); comp.j1 = std::max(comp.j1, j);
        for (int k = 0; k < ndirs; ++k) {
          int ni = i + dirs[k][0], nj = j + dirs[k][1];
          if (!g.in_bounds(ni, nj) || seen[ni * g.w + nj]) continue;
          std::uint8_t c = g.at(ni, nj);
          if (c == kTransparent) continue;
          if (same_color && c != col) continue;
          seen[ni * g.w + nj] = 1;
          q.push({ni, nj});
        }
      }
      std::sort(comp.cells.begin(), comp.cells.end());
      out.push_back(std::move(comp));
    }
  }
  return out;
}

Obj component_to_obj(const Grid& g, const Component& c) {
  Grid sprite(GridKind::Sprite, c.height(), c.width(), kTransparent);
  for (auto [i, j] : c.cells) sprite.at(i - c.i0, j - c.j0) = g.at(i, j);
  return Obj{Vec2{c.i0, c.j0}, std::move(sprite)};
}

// --- Motifs ----------------------------------------------------------------

std::pair<int, int> sym_core_size(Motif::SymGroup g, int h, int w) {
  int ch = (h + 1) / 2, cw = (w + 1) / 2;
  switch (g) {
    case Motif::SymGroup::H: return {ch, w};
    case Motif::SymGroup::V: return {h, cw};
    case Motif::SymGroup::Rot180: return {ch, w};
    case Motif::SymGroup::HV: return {ch, cw};
    case Motif::SymGroup::Rot90: return {ch, cw};
    case Motif::SymGroup::Dihedral: return {ch, cw};
    case Motif::SymGroup::D: return {h, w};
    case Motif::SymGroup::A: return {h, w};
  }
  return {h, w};
}

namespace {

// Generators of each subgroup, as cell maps on an h x w rectangle.
void orbit_cells(Motif::SymGroup g, int h, int w, int i, int j,
                 std::vector<std::pair<int, int>>& out) {
  auto fh = [&](std::pair<int, int> p) { return std::make_pair(h - 1 - p.first, p.second); };
  auto fv = [&](std::pair<int, int> p) { return std::make_pair(p.first, w - 1 - p.second); };
  auto r180 = [&](std::pair<int, int> p) { return std::make_pair(h - 1 - p.first, w - 1 - p.second); };
  auto tr = [&](std::pair<int, int> p) { return std::make_pair(p.second, p.first); };
  auto atr = [&](std::pair<int, int> p) { return std::make_pair(w - 1 - p.second, h - 1 - p.first); };
  auto r90 = [&](std::pair<int, int> p) { return std::make_pair(w - 1 - p.second, p.first); };

  std::pair<int, int> p{i, j};
  out.clear();
  out.push_back(p);
  switch (g) {
    case Motif::SymGroup::H: out.push_back(fh(p)); break;
    case Motif::SymGroup::V: out.push_back(fv(p)); break;
    case Motif::SymGroup::Rot180: out.push_back(r180(p)); break;
    case Motif::SymGroup::D: out.push_back(tr(p)); break;
    case Motif::SymGroup::A: out.push_back(atr(p)); break;
    case Motif::SymGroup::HV:
      out.push_back(fh(p)); out.push_back(fv(p)); out.push_back(r180(p));
      break;
    case Motif::SymGroup::Rot90:
      out.push_back(r90(p)); out.push_back(r180(p)); out.push_back(r90(r180(p)));
      break;
    case Motif::SymGroup::Dihedral:
      out.push_back(fh(p)); out.push_back(fv(p)); out.push_back(r180(p));
      out.push_back(tr(p)); out.push_back(atr(p));
      out.push_back(r90(p)); out.push_back(r90(r180(p)));
      break;
  }
}

bool group_needs_square(Motif::SymGroup g) {
  return g == Motif::SymGroup::D || g == Motif::SymGroup::A ||
         g == Motif::SymGroup::Rot90 || g == Motif::SymGroup::Dihedral;
}

}  // namespace

std::pair<int, int> sym_rep(Motif::SymGroup g, int h, int w, int i, int j) {
  std::vector<std::pair<int, int>> orb;
  orbit_cells(g, h, w, i, j, orb);
  return *std::min_element(orb.begin(), orb.end());
}

std::optional<Grid> expand_motif(const Motif& m, const Grid& core) {
  switch (m.family) {
    case Motif::Family::Symmetry: {
      // Target size from the core and the sharing flags.
      int h, w;
      auto g = m.group;
      int ch = core.h, cw = core.w;
      switch (g) {
        case Motif::SymGroup::H: h = 2 * ch - m.share_i; w = cw; break;
        case Motif::SymGroup::V: h = ch; w = 2 * cw - m.share_j; break;
        case Motif::SymGroup::Rot180: h = 2 * ch - m.share_i; w = cw; break;
        case Motif::SymGroup::HV:
        case Motif::SymGroup::Rot90:
        case Motif::SymGroup::Dihedral:
          h = 2 * ch - m.share_i; w = 2 * cw - m.share_j; break;
        case Motif::SymGroup::D:
        case Motif::SymGroup::A:
          h = ch; w = cw; break;
      }
      if (h < 1 || w < 1 || h > kMaxSide || w > kMaxSide) return std::nullopt;
      if (group_needs_square(g) && h != w) return std::nullopt;
      auto [wantCh, wantCw] = sym_core_size(g, h, w);
      if (wantCh != ch || wantCw != cw) return std::nullopt;
      Grid out(core.kind, h, w, kTransparent);
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
          auto [ri, rj] = sym_rep(g, h, w, i, j);
          out.at(i, j) = core.at(ri, rj);  // reps lie inside the core rectangle
        }
      return out;
    }
    case Motif::Family::Periodic: {
      if (m.h < core.h || m.w < core.w) return std::nullopt;
      if (m.h > kMaxSide || m.w > kMaxSide) return std::nullopt;
      return tile(core, m.h, m.w);
    }
    case Motif::Family::Template: {
      if (core.h != 1 || core.w != 1) return std::nullopt;
      if (core.at(0, 0) == kTransparent) return std::nullopt;
      if (m.h < 1 || m.w < 1 || m.h > kMaxSide || m.w > kMaxSide) return std::nullopt;
      if (core.kind == GridKind::Full) return std::nullopt;  // needs transparency
      Grid out(core.kind, m.h, m.w, kTransparent);
      for (int i = 0; i < m.h; ++i)
        for (int j = 0; j < m.w; ++j)
          if (template_cell(m.shape, m.h, m.w, i, j)) out.at(i, j) = core.at(0, 0);
      return out;
    }
  }
  return std::nullopt;
}

Grid tile(const Grid& core, int h, int w) {
  Grid out(core.kind, h, w, kTransparent);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) out.at(i, j) = core.at(i % core.h, j % core.w);
  return out;
}

bool template_cell(Motif::Shape s, int h, int w, int i, int j) {
  switch (s) {
    case Motif::Shape::Rectangle:
      return true;
    case Motif::Shape::Cross:
      return i == (h - 1) / 2 || i == h / 2 || j == (w - 1) / 2 || j == w / 2;
    case Motif::Shape::Border:
      return i == 0 || i == h - 1 || j == 0 || j == w - 1;
  }
  return false;
}

std::vector<std::pair<Motif, Grid>> motif_candidates(const Grid& g) {
  std::vector<std::pair<Motif, Grid>> out;
  const int h = g.h, w = g.w;

  // Periodic cores first, smaller cores are more promising. Periods are at
  // most half the grid on the periodic axis; the full extent means "not
  // periodic on this axis".
  std::vector<int> phs, pws;
  for (int p = 1; p <= h / 2; ++p) phs.push_back(p);
  phs.push_back(h);
  for (int p = 1; p <= w / 2; ++p) pws.push_back(p);
  pws.push_back(w);
  std::vector<std::pair<int, std::pair<int, int>>> periods;
  for (int ph : phs)
    for (int pw : pws) {
      if (ph == h && pw == w) continue;  // trivial
      periods.push_back({ph * pw, {ph, pw}});
    }
  std::sort(periods.begin(), periods.end());
  for (auto& [area, p] : periods) {
    (void)area;
    auto core = crop(g, 0, 0, p.first, p.second);
    out.push_back({Motif::periodic(h, w), std::move(*core)});
  }

  // Symmetry cores, larger groups first (more compression).
  static const Motif::SymGroup order[] = {
      Motif::SymGroup::Dihedral, Motif::SymGroup::Rot90, Motif::SymGroup::HV,
      Motif::SymGroup::H, Motif::SymGroup::V, Motif::SymGroup::Rot180,
      Motif::SymGroup::D, Motif::SymGroup::A};
  for (auto grp : order) {
    if (group_needs_square(grp) && h != w) continue;
    auto [ch, cw] = sym_core_size(grp, h, w);
    Motif m = Motif::symmetry(grp, 2 * ch - h == 1 && ch != h,
                              2 * cw - w == 1 && cw != w);
    // Sharing flags only describe the halved axes.
    switch (grp) {
      case Motif::SymGroup::H:
      case Motif::SymGroup::Rot180:
        m.share_i = (h % 2 == 1); m.share_j = false; break;
      case Motif::SymGroup::V:
        m.share_i = false; m.share_j = (w % 2 == 1); break;
      case Motif::SymGroup::HV:
      case Motif::SymGroup::Rot90:
      case Motif::SymGroup::Dihedral:
        m.share_i = (h % 2 == 1); m.share_j = (w % 2 == 1); break;
      case Motif::SymGroup::D:
      case Motif::SymGroup::A:
        m.share_i = m.share_j = false; break;
    }
    auto core = crop(g, 0, 0, ch, cw);
    out.push_back({m, std::move(*core)});
  }

  // Shape templates for grids with transparency.
  if (g.kind != GridKind::Full) {
    for (auto s : {Motif::Shape::Rectangle, Motif::Shape::Cross, Motif::Shape::Border}) {
      // Core color: majority color over the template cells.
      std::array<int, kNumColors> cnt{};
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
          if (template_cell(s, h, w, i, j) && g.at(i, j) != kTransparent)
            ++cnt[g.at(i, j)];
      int best = -1, bestn = 0;
      for (int c = 0; c < kNumColors; ++c)
        if (cnt[c] > bestn) { bestn = cnt[c]; best = c; }
      if (best < 0) continue;
      Grid core(g.kind, 1, 1, static_cast<std::uint8_t>(best));
      out.push_back({Motif::templ(s, h, w), std::move(core)});
    }
  }
  return out;
}

}  // namespace madil
