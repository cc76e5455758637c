#include "corpus.hpp"

#include <functional>
#include <random>

namespace madil::corpus {

namespace {

const int T = kTransparent;

Task make(std::string id, std::vector<std::pair<Grid, Grid>> train,
          std::pair<Grid, Grid> test) {
  Task t;
  t.id = std::move(id);
  t.train = std::move(train);
  t.test.push_back({test.first, test.second});
  return t;
}

Grid random_full(std::mt19937& rng, int h, int w, int ncolors) {
  std::uniform_int_distribution<int> color(0, ncolors - 1);
  Grid g(GridKind::Full, h, w, 0);
  for (auto& c : g.cells) c = static_cast<std::uint8_t>(color(rng));
  return g;
}

// Black background with one solid rectangle of the given color.
Grid rect_on_bg(int h, int w, std::uint8_t color, int i0, int j0, int hh, int ww,
                std::uint8_t bg = 0) {
  Grid g(GridKind::Full, h, w, bg);
  for (int i = i0; i < i0 + hh; ++i)
    for (int j = j0; j < j0 + ww; ++j) g.at(i, j) = color;
  return g;
}

// Black background with a random connected-ish blob of one color.
Grid blob_on_bg(std::mt19937& rng, int h, int w, std::uint8_t color, std::uint8_t bg = 0) {
  Grid g(GridKind::Full, h, w, bg);
  std::uniform_int_distribution<int> ri(0, h - 1), rj(0, w - 1);
  int i = ri(rng), j = rj(rng);
  for (int step = 0; step < h * w / 2; ++step) {
    g.at(i, j) = color;
    int dir = rng() % 4;
    i = std::clamp(i + (dir == 0) - (dir == 1), 0, h - 1);
    j = std::clamp(j + (dir == 2) - (dir == 3), 0, w - 1);
  }
  return g;
}

// Applies f per example to build a function task.
Task fn_task(const std::string& id, const std::vector<Grid>& inputs,
             const std::function<Grid(const Grid&)>& f) {
  std::vector<std::pair<Grid, Grid>> train;
  for (size_t k = 0; k + 1 < inputs.size(); ++k) train.push_back({inputs[k], f(inputs[k])});
  return make(id, std::move(train), {inputs.back(), f(inputs.back())});
}

Grid recolor_cells(const Grid& g, std::uint8_t bg, std::uint8_t to) {
  Grid out = g;
  for (auto& c : out.cells)
    if (c != bg) c = to;
  return out;
}

// Inputs for the metagrid/unfold family. The mask rows use 1 for a shape
// cell.
struct QuadSpec {
  int k;
  std::uint8_t sep, shape;
  std::vector<std::vector<int>> mask;
};

std::pair<Grid, Grid> quadrant_example(const QuadSpec& s) {
  int n = 2 * s.k + 1;
  Grid in(GridKind::Full, n, n, 0);
  for (int t = 0; t < n; ++t) {
    in.at(s.k, t) = s.sep;
    in.at(t, s.k) = s.sep;
  }
  Grid core(GridKind::Sprite, s.k, s.k, T);
  for (int i = 0; i < s.k; ++i)
    for (int j = 0; j < s.k; ++j)
      if (s.mask[i][j]) {
        in.at(i, j) = s.shape;
        core.at(i, j) = s.sep;  // output shape takes the separator color
      }
  auto pure = expand_motif(Motif::symmetry(Motif::SymGroup::HV), core);
  Grid out(GridKind::Full, 2 * s.k, 2 * s.k, 0);
  out = overlay(out, *pure);
  return {in, out};
}

}  // namespace

Task quadrant_unfold_task() {
  std::vector<QuadSpec> specs = {
      {4, 2, 1, {{1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}},
      {3, 3, 4, {{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}},
      {4, 8, 6, {{0, 1, 1, 0}, {1, 0, 0, 0}, {1, 1, 0, 1}, {0, 0, 1, 0}}},
      {5, 1, 3, {{1, 0, 0, 1, 0}, {0, 1, 0, 0, 1}, {1, 1, 0, 1, 0},
                 {0, 0, 1, 0, 0}, {0, 1, 0, 0, 1}}},
  };
  std::vector<std::pair<Grid, Grid>> pairs;
  for (const auto& s : specs) pairs.push_back(quadrant_example(s));
  return make("quadrant_unfold", {pairs[0], pairs[1], pairs[2]}, pairs[3]);
}

TaskModel quadrant_unfold_model() {
  VarId v = 0;
  VarId bgcolor = v++, sepcolor = v++, borders = v++, dims = v++, heights = v++,
        widths = v++, color = v++, mask = v++;

  auto inst = [](PatternName n, GridKind k = GridKind::Full, int d = 0, int lift = 0) {
    PatternInstance p;
    p.id.name = n;
    p.id.kind = k;
    p.id.d = d;
    p.lift = lift;
    return p;
  };

  // input: BgColor(?, Metagrid(?, ?, ?, ?, ?, Cons_0(Cons_0(Monocolor(?,?),
  //        Empty^1(?)), Empty^2(?))))
  auto tl = ModelNode::pattern(v++, inst(PatternName::Monocolor, GridKind::Sprite),
                               {ModelNode::unknown(color), ModelNode::unknown(mask)});
  auto row_rest = ModelNode::pattern(v++, inst(PatternName::Empty, GridKind::Sprite, 0, 1),
                                     {ModelNode::unknown(v++)});
  auto first_row = ModelNode::pattern(v++, inst(PatternName::Cons, GridKind::Full, 0),
                                      {tl, row_rest});
  auto rest_rows = ModelNode::pattern(v++, inst(PatternName::Empty, GridKind::Sprite, 0, 2),
                                      {ModelNode::unknown(v++)});
  auto subgrids = ModelNode::pattern(v++, inst(PatternName::Cons, GridKind::Full, 0),
                                     {first_row, rest_rows});
  auto metagrid = ModelNode::pattern(
      v++, inst(PatternName::Metagrid, GridKind::Sprite),
      {ModelNode::unknown(sepcolor), ModelNode::unknown(borders), ModelNode::unknown(dims),
       ModelNode::unknown(heights), ModelNode::unknown(widths), subgrids});
  auto input = ModelNode::pattern(v++, inst(PatternName::BgColor),
                                  {ModelNode::unknown(bgcolor), metagrid});

  // output: BgColor(= bgcolor, Motif(= SymHV, Monocolor(= sepcolor, = mask), ?, ?))
  auto motif_const = ModelNode::expression(
      v++, Expression::constant(Value(Motif::symmetry(Motif::SymGroup::HV))));
  auto core = ModelNode::pattern(
      v++, inst(PatternName::Monocolor, GridKind::Sprite),
      {ModelNode::expression(v++, Expression::var(sepcolor)),
       ModelNode::expression(v++, Expression::var(mask))});
  auto contents = ModelNode::pattern(
      v++, inst(PatternName::MotifP, GridKind::Sprite),
      {motif_const, core, ModelNode::unknown(v++), ModelNode::unknown(v++)});
  auto output = ModelNode::pattern(
      v++, inst(PatternName::BgColor),
      {ModelNode::expression(v++, Expression::var(bgcolor)), contents});

  TaskModel M;
  M.input = input;
  M.output = output;
  M.next_var = v;
  if (!well_formed(M)) throw std::logic_error("quadrant model must be well-formed");
  return M;
}

std::vector<Task> curated30() {
  std::vector<Task> tasks;
  std::mt19937 rng(2024);

  auto inputs_random = [&](int n, int hlo, int hhi, int colors) {
    std::vector<Grid> out;
    std::uniform_int_distribution<int> side(hlo, hhi);
    for (int k = 0; k < n; ++k) out.push_back(random_full(rng, side(rng), side(rng), colors));
    return out;
  };

  // --- expression tasks over whole grids ---
  tasks.push_back(fn_task("c01_echo", inputs_random(3, 2, 5, 5),
                          [](const Grid& g) { return g; }));
  tasks.push_back(fn_task("c02_flip_h", inputs_random(3, 2, 5, 5),
                          [](const Grid& g) { return transform(g, SymTransform::FlipH); }));
  tasks.push_back(fn_task("c03_flip_v", inputs_random(3, 2, 5, 5),
                          [](const Grid& g) { return transform(g, SymTransform::FlipV); }));
  tasks.push_back(fn_task("c04_rot180", inputs_random(3, 2, 5, 5),
                          [](const Grid& g) { return transform(g, SymTransform::Rot180); }));
  {
    std::vector<Grid> sq = {random_full(rng, 3, 3, 6), random_full(rng, 4, 4, 6),
                            random_full(rng, 5, 5, 6)};
    tasks.push_back(fn_task("c05_transpose", sq, [](const Grid& g) {
      return transform(g, SymTransform::Transpose);
    }));
  }
  tasks.push_back(fn_task("c06_half_top", inputs_random(3, 4, 6, 5),
                          [](const Grid& g) { return *crop(g, 0, 0, g.h / 2, g.w); }));
  tasks.push_back(fn_task("c07_quad_tl", inputs_random(3, 4, 6, 5),
                          [](const Grid& g) { return *crop(g, 0, 0, g.h / 2, g.w / 2); }));
  tasks.push_back(fn_task("c08_unfold_h", inputs_random(3, 2, 4, 5), [](const Grid& g) {
    Grid out(GridKind::Full, 2 * g.h, g.w, 0);
    out = overlay(out, g, 0, 0);
    out = overlay(out, transform(g, SymTransform::FlipH), g.h, 0);
    return out;
  }));
  tasks.push_back(fn_task("c09_unfold_hv", inputs_random(3, 2, 4, 5), [](const Grid& g) {
    Grid out(GridKind::Full, 2 * g.h, 2 * g.w, 0);
    out = overlay(out, g, 0, 0);
    out = overlay(out, transform(g, SymTransform::FlipV), 0, g.w);
    out = overlay(out, transform(g, SymTransform::FlipH), g.h, 0);
    out = overlay(out, transform(g, SymTransform::Rot180), g.h, g.w);
    return out;
  }));
  {
    // duplicated rows and columns compress away
    std::vector<Grid> ins;
    for (int k = 0; k < 3; ++k) {
      Grid base = random_full(rng, 2, 3, 5);
      Grid dup(GridKind::Full, 4, 3, 0);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) dup.at(i, j) = base.at(i / 2, j);
      ins.push_back(dup);
    }
    tasks.push_back(fn_task("c10_unrepeat", ins, [](const Grid& g) {
      Grid out(GridKind::Full, g.h / 2, g.w, 0);
      for (int i = 0; i < out.h; ++i)
        for (int j = 0; j < g.w; ++j) out.at(i, j) = g.at(2 * i, j);
      return out;
    }));
  }

  // --- background / monocolor tasks ---
  auto shape_inputs = [&](int n, std::vector<std::uint8_t> colors) {
    std::vector<Grid> out;
    for (int k = 0; k < n; ++k)
      out.push_back(blob_on_bg(rng, 4 + k % 3, 4 + (k + 1) % 3, colors[k % colors.size()]));
    return out;
  };
  tasks.push_back(fn_task("c11_majority_fill", inputs_random(3, 3, 5, 3), [](const Grid& g) {
    return Grid(GridKind::Full, g.h, g.w, *majority_color(g));
  }));
  tasks.push_back(fn_task("c12_recolor_const", shape_inputs(3, {5, 7, 8}), [](const Grid& g) {
    return recolor_cells(g, 0, 4);
  }));
  tasks.push_back(fn_task("c13_bg_to_5", shape_inputs(3, {1, 2, 3}), [](const Grid& g) {
    Grid out = g;
    for (auto& c : out.cells)
      if (c == 0) c = 5;
    return out;
  }));
  tasks.push_back(fn_task("c14_bg_color_probe", shape_inputs(3, {2, 4, 6}), [](const Grid& g) {
    return Grid(GridKind::Full, 1, 1, *majority_color(g));
  }));
  tasks.push_back(fn_task("c15_shape_color_probe", shape_inputs(3, {2, 4, 6}),
                          [](const Grid& g) {
                            return Grid(GridKind::Full, 1, 1, *minority_color(g));
                          }));
  tasks.push_back(fn_task("c16_role_swap", shape_inputs(3, {1, 2, 3}), [](const Grid& g) {
    std::uint8_t bg = *majority_color(g), fg = *minority_color(g);
    Grid out = g;
    for (auto& c : out.cells) c = (c == bg) ? fg : bg;
    return out;
  }));
  tasks.push_back(fn_task("c17_border_only", shape_inputs(3, {1, 2, 3}), [](const Grid& g) {
    Grid out = g;
    for (int i = 0; i < g.h; ++i)
      for (int j = 0; j < g.w; ++j) {
        if (g.at(i, j) == 0) continue;
        bool border = false;
        for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          int ni = i + di, nj = j + dj;
          if (!g.in_bounds(ni, nj) || g.at(ni, nj) == 0) border = true;
        }
        if (!border) out.at(i, j) = 0;
      }
    return out;
  }));

  // --- motif tasks ---
  {
    std::vector<Grid> ins;
    std::vector<std::pair<int, int>> reps = {{2, 3}, {3, 2}, {2, 2}};
    std::vector<Grid> cores;
    for (int k = 0; k < 3; ++k) cores.push_back(random_full(rng, 2, 3, 4));
    std::vector<std::pair<Grid, Grid>> train;
    for (int k = 0; k < 3; ++k)
      ins.push_back(tile(cores[k], cores[k].h * reps[k].first, cores[k].w * reps[k].second));
    std::vector<Grid> outs = cores;
    train = {{ins[0], outs[0]}, {ins[1], outs[1]}};
    tasks.push_back(make("c18_periodic_core", train, {ins[2], outs[2]}));
  }
  {
    // fixed size: 3x3 tiles out to 6x6
    std::vector<Grid> ins = {random_full(rng, 3, 3, 5), random_full(rng, 3, 3, 5),
                             random_full(rng, 3, 3, 5)};
    tasks.push_back(fn_task("c19_tile_2x2", ins, [](const Grid& g) { return tile(g, 6, 6); }));
  }
  {
    // horizontally symmetric inputs; output keeps the top half
    std::vector<Grid> ins;
    for (int k = 0; k < 3; ++k) {
      Grid top = random_full(rng, 2 + k % 2, 4, 5);
      Grid full(GridKind::Full, 2 * top.h, 4, 0);
      full = overlay(full, top, 0, 0);
      full = overlay(full, transform(top, SymTransform::FlipH), top.h, 0);
      ins.push_back(full);
    }
    tasks.push_back(fn_task("c20_sym_half", ins,
                            [](const Grid& g) { return *crop(g, 0, 0, g.h / 2, g.w); }));
  }

  // --- dependent-pattern (crop) tasks ---
  {
    std::vector<Grid> ins = {random_full(rng, 5, 6, 7), random_full(rng, 6, 5, 7),
                             random_full(rng, 6, 6, 7)};
    tasks.push_back(fn_task("c21_crop_fixed", ins,
                            [](const Grid& g) { return *crop(g, 1, 1, 3, 3); }));
  }
  {
    // output is the content bounding box of a single shape
    std::vector<Grid> ins;
    std::vector<Grid> outs;
    std::vector<std::pair<Grid, Grid>> train;
    for (int k = 0; k < 3; ++k) {
      int h = 6 + k % 2, w = 6 + (k + 1) % 2;
      int hh = 2 + k % 2, ww = 2 + (k + 1) % 2;
      int i0 = 1 + k % 3, j0 = 1 + (k + 1) % 3;
      Grid g = rect_on_bg(h, w, static_cast<std::uint8_t>(2 + k), i0, j0, hh, ww);
      g.at(i0, j0) = 9;  // make the shape bicolor so the crop is unique
      ins.push_back(g);
      outs.push_back(*crop(g, i0, j0, hh, ww));
    }
    train = {{ins[0], outs[0]}, {ins[1], outs[1]}};
    tasks.push_back(make("c22_crop_content", train, {ins[2], outs[2]}));
  }

  // --- objects tasks ---
  auto two_rects = [&](int k) {
    int h = 7, w = 7;
    Grid g(GridKind::Full, h, w, 0);
    // one large and one small rectangle, never touching
    int big = 2 + k % 2;
    for (int i = 0; i < big + 1; ++i)
      for (int j = 0; j < big; ++j) g.at(i, j) = static_cast<std::uint8_t>(3 + k % 3);
    g.at(5, 5) = static_cast<std::uint8_t>(1 + k % 2);
    return g;
  };
  {
    std::vector<Grid> ins = {two_rects(0), two_rects(1), two_rects(2)};
    tasks.push_back(fn_task("c23_largest_color", ins, [](const Grid& g) {
      auto comps = components(g, false, true);
      const Component* best = &comps[0];
      for (const auto& c : comps)
        if (c.area() > best->area()) best = &c;
      return Grid(GridKind::Full, 1, 1, g.at(best->cells[0].first, best->cells[0].second));
    }));
  }
  {
    std::vector<Grid> ins = {two_rects(3), two_rects(4), two_rects(5)};
    tasks.push_back(fn_task("c24_largest_object", ins, [](const Grid& g) {
      auto comps = components(g, false, true);
      const Component* best = &comps[0];
      for (const auto& c : comps)
        if (c.area() > best->area()) best = &c;
      Obj o = component_to_obj(g, *best);
      Grid out(GridKind::Full, o.sprite.h, o.sprite.w, 0);
      return overlay(out, o.sprite);
    }));
  }
  {
    // a single solid rectangle: the output is its bounding box contents
    std::vector<Grid> ins;
    for (int k = 0; k < 3; ++k)
      ins.push_back(rect_on_bg(6, 6, static_cast<std::uint8_t>(2 + k), 1 + k % 2, 1, 2, 2 + k % 2));
    tasks.push_back(fn_task("c25_object_box", ins, [](const Grid& g) {
      int i0 = g.h, j0 = g.w, i1 = -1, j1 = -1;
      for (int i = 0; i < g.h; ++i)
        for (int j = 0; j < g.w; ++j)
          if (g.at(i, j) != 0) {
            i0 = std::min(i0, i); j0 = std::min(j0, j);
            i1 = std::max(i1, i); j1 = std::max(j1, j);
          }
      return *crop(g, i0, j0, i1 - i0 + 1, j1 - j0 + 1);
    }));
  }

  // --- metagrid tasks ---
  auto metagrid_input = [&](std::uint8_t sep, std::vector<std::uint8_t> cells, int k) {
    // 2x2 metagrid of monochrome k x k quadrants
    int n = 2 * k + 1;
    Grid g(GridKind::Full, n, n, 0);
    for (int t1 = 0; t1 < n; ++t1) {
      g.at(k, t1) = sep;
      g.at(t1, k) = sep;
    }
    int q = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            g.at(a * (k + 1) + i, b * (k + 1) + j) = cells[q];
        ++q;
      }
    return g;
  };
  {
    std::vector<std::pair<Grid, Grid>> train;
    Grid i1 = metagrid_input(4, {1, 2, 3, 5}, 2);
    Grid i2 = metagrid_input(6, {2, 3, 5, 1}, 3);
    Grid i3 = metagrid_input(1, {3, 5, 2, 9}, 2);
    train = {{i1, Grid(GridKind::Full, 1, 1, 4)}, {i2, Grid(GridKind::Full, 1, 1, 6)}};
    tasks.push_back(make("c26_sep_color", train, {i3, Grid(GridKind::Full, 1, 1, 1)}));
  }
  {
    std::vector<std::pair<Grid, Grid>> train;
    Grid i1 = metagrid_input(4, {1, 2, 3, 5}, 2);
    Grid i2 = metagrid_input(6, {2, 3, 5, 1}, 3);
    Grid i3 = metagrid_input(1, {3, 5, 2, 9}, 2);
    train = {{i1, Grid(GridKind::Full, 2, 2, 1)}, {i2, Grid(GridKind::Full, 3, 3, 2)}};
    tasks.push_back(make("c27_metagrid_tl", train, {i3, Grid(GridKind::Full, 2, 2, 3)}));
  }

  // --- stretch tasks ---
  tasks.push_back(quadrant_unfold_task());
  tasks.back().id = "c28_quadrant_unfold";
  {
    // 1xN rows reversed
    std::vector<Grid> ins = {random_full(rng, 1, 5, 6), random_full(rng, 1, 4, 6),
                             random_full(rng, 1, 6, 6)};
    tasks.push_back(fn_task("c29_row_reverse", ins, [](const Grid& g) {
      return transform(g, SymTransform::FlipV);
    }));
  }
  {
    // keep the shape, recolor it with the majority (background) color moved
    // to a 1x2 summary: [bg, shape]
    std::vector<Grid> ins = shape_inputs(3, {2, 7, 8});
    tasks.push_back(fn_task("c30_color_pair", ins, [](const Grid& g) {
      Grid out(GridKind::Full, 1, 2, 0);
      out.at(0, 0) = *majority_color(g);
      out.at(0, 1) = *minority_color(g);
      return out;
    }));
  }
  return tasks;
}

}  // namespace madil::corpus
