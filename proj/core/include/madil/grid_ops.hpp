#pragma once

#include <optional>
#include <vector>

#include "madil/values.hpp"

namespace madil {

// Symmetry transforms of a grid. Transpose-like ones require h == w for
// in-place application; as free transforms they swap dimensions.
enum class SymTransform : std::uint8_t {
  Identity,
  FlipH,   // top-bottom mirror
  FlipV,   // left-right mirror
  Rot90,   // counterclockwise
  Rot180,
  Rot270,
  Transpose,      // main diagonal
  AntiTranspose,  // anti diagonal
};

constexpr int kNumSymTransforms = 8;

Grid transform(const Grid& g, SymTransform t);

// Rectangle copy; returns nullopt when out of bounds.
std::optional<Grid> crop(const Grid& g, int i0, int j0, int h, int w);

// Paints the non-transparent cells of `top` over `base` at offset (oi, oj).
// Cells falling outside base are ignored.
Grid overlay(const Grid& base, const Grid& top, int oi = 0, int oj = 0);

// Count of each cell state (index kTransparent = transparent count).
std::array<int, kTransparent + 1> cell_counts(const Grid& g);

// Colors present (0..9 only), most frequent first, ties by code.
std::vector<std::uint8_t> colors_by_frequency(const Grid& g);

int count_nontransparent(const Grid& g);

// Most frequent color, ties by code; nullopt for all-transparent grids.
std::optional<std::uint8_t> majority_color(const Grid& g);
std::optional<std::uint8_t> minority_color(const Grid& g);

// Bounding box of non-transparent cells: (i0, j0, h, w).
std::optional<std::array<int, 4>> content_bbox(const Grid& g);

struct Component {
  std::vector<std::pair<int, int>> cells;
  int i0 = 0, j0 = 0, i1 = 0, j1 = 0;  // bbox, inclusive
  int area() const { return static_cast<int>(cells.size()); }
  int height() const { return i1 - i0 + 1; }
  int width() const { return j1 - j0 + 1; }
};

// Connected components of non-transparent cells. When same_color is set,
// cells connect only when they hold the same color.
std::vector<Component> components(const Grid& g, bool diag, bool same_color);

// Extracts a component as an object (position + trimmed sprite).
Obj component_to_obj(const Grid& g, const Component& c);

// --- Motif expansion ---------------------------------------------------

// The canonical core rectangle of a symmetry group on an (h, w) grid.
// Returns (core_h, core_w). For D / A the core is the whole grid.
std::pair<int, int> sym_core_size(Motif::SymGroup g, int h, int w);

// Orbit representative (lexicographically smallest cell in the orbit of
// (i, j) under the group acting on an h x w rectangle).
std::pair<int, int> sym_rep(Motif::SymGroup g, int h, int w, int i, int j);

// Deterministic expansion of a core grid under a motif. The result size is
// fully determined by the motif and the core. Returns nullopt when the core
// is incompatible (e.g. non-square core for a rotation group).
std::optional<Grid> expand_motif(const Motif& m, const Grid& core);

// All motif decompositions of g: pairs (motif, core) such that
// expand_motif(motif, core) has g's size, ordered most promising first.
// Exactness against g is the caller's concern (noise handling).
std::vector<std::pair<Motif, Grid>> motif_candidates(const Grid& g);

// Tiles `core` to an h x w grid of the same kind.
Grid tile(const Grid& core, int h, int w);

// Template shape membership.
bool template_cell(Motif::Shape s, int h, int w, int i, int j);

}  // namespace madil
