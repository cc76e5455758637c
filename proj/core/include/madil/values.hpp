#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace madil {

// ---------------------------------------------------------------------------
// The ARC value universe: grids, vectors, colors, color maps, motifs,
// integers, objects, and n-D sequences of those.
// ---------------------------------------------------------------------------

constexpr int kNumColors = 10;
constexpr int kMaxSide = 30;

// Cell state inside a grid. 0..9 are colors, kTransparent is the extra
// state used by sprites and masks. Never a standalone color value.
constexpr std::uint8_t kTransparent = 10;

constexpr std::uint8_t kBlack = 0;

struct ColorV {
  std::uint8_t code = 0;  // 0..9
  bool operator==(const ColorV&) const = default;
};

enum class GridKind : std::uint8_t { Full, Sprite, Mask };

const char* grid_kind_name(GridKind k);

struct Grid {
  GridKind kind = GridKind::Full;
  int h = 0;
  int w = 0;
  std::vector<std::uint8_t> cells;  // row-major, h*w entries

  Grid() = default;
  Grid(GridKind k, int hh, int ww, std::uint8_t fill);

  std::uint8_t at(int i, int j) const { return cells[static_cast<size_t>(i) * w + j]; }
  std::uint8_t& at(int i, int j) { return cells[static_cast<size_t>(i) * w + j]; }
  bool in_bounds(int i, int j) const { return i >= 0 && i < h && j >= 0 && j < w; }
  size_t area() const { return cells.size(); }

  // Per-kind cell invariants (full: no transparent, mask: black or
  // transparent only) plus the 1..30 side bounds.
  bool valid() const;

  bool operator==(const Grid& o) const = default;
};

struct Vec2 {
  std::int64_t i = 0;
  std::int64_t j = 0;
  bool operator==(const Vec2&) const = default;
};

struct Obj {
  Vec2 pos;
  Grid sprite;  // kind Sprite, dims >= 1
  bool operator==(const Obj&) const = default;
};

// Partial map color -> color. kAbsent marks colors outside the domain.
struct ColorMap {
  static constexpr std::uint8_t kAbsent = 255;
  std::array<std::uint8_t, kNumColors> to{};

  ColorMap() { to.fill(kAbsent); }
  bool has(std::uint8_t c) const { return to[c] != kAbsent; }
  int domain_size() const;
  std::uint8_t apply(std::uint8_t c) const { return has(c) ? to[c] : c; }
  bool operator==(const ColorMap&) const = default;
};

// A geometric regularity: a deterministic expansion from a core grid to a
// full grid. Symmetries carry per-axis center-sharing flags so the expanded
// size is determined by the core alone; periodic and template motifs carry
// their target size.
struct Motif {
  enum class Family : std::uint8_t { Symmetry, Periodic, Template };
  enum class SymGroup : std::uint8_t { H, V, D, A, Rot180, Rot90, HV, Dihedral };
  enum class Shape : std::uint8_t { Rectangle, Cross, Border };

  Family family = Family::Symmetry;
  SymGroup group = SymGroup::H;
  bool share_i = false;
  bool share_j = false;
  int h = 0;  // Periodic / Template target size
  int w = 0;
  Shape shape = Shape::Rectangle;

  bool operator==(const Motif&) const = default;

  static Motif symmetry(SymGroup g, bool si = false, bool sj = false);
  static Motif periodic(int h, int w);
  static Motif templ(Shape s, int h, int w);
};

const char* sym_group_name(Motif::SymGroup g);
const char* shape_name(Motif::Shape s);

class Value;

// n-D sequence: depth >= 1 layers of sequences around scalar values.
// Sub-sequence lengths may differ (no regularity constraint).
struct Seq {
  int depth = 1;
  std::shared_ptr<const std::vector<Value>> items;

  Seq() = default;
  Seq(int d, std::vector<Value> xs);
  const std::vector<Value>& get() const;
  size_t len() const;
  bool operator==(const Seq& o) const;
};

enum class Tag : std::uint8_t { Int, Color, Vec, Grid, Obj, ColorMap, Motif, Seq };

const char* tag_name(Tag t);

class Value {
 public:
  using Variant =
      std::variant<std::int64_t, ColorV, Vec2, Grid, Obj, ColorMap, Motif, Seq>;

  Value() : v_(std::int64_t{0}) {}
  Value(std::int64_t n) : v_(n) {}
  Value(ColorV c) : v_(c) {}
  Value(Vec2 v) : v_(v) {}
  Value(Grid g) : v_(std::move(g)) {}
  Value(Obj o) : v_(std::move(o)) {}
  Value(ColorMap m) : v_(m) {}
  Value(Motif m) : v_(m) {}
  Value(Seq s) : v_(std::move(s)) {}

  Tag tag() const { return static_cast<Tag>(v_.index()); }

  bool is_int() const { return tag() == Tag::Int; }
  bool is_color() const { return tag() == Tag::Color; }
  bool is_vec() const { return tag() == Tag::Vec; }
  bool is_grid() const { return tag() == Tag::Grid; }
  bool is_obj() const { return tag() == Tag::Obj; }
  bool is_colormap() const { return tag() == Tag::ColorMap; }
  bool is_motif() const { return tag() == Tag::Motif; }
  bool is_seq() const { return tag() == Tag::Seq; }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  ColorV as_color() const { return std::get<ColorV>(v_); }
  const Vec2& as_vec() const { return std::get<Vec2>(v_); }
  const Grid& as_grid() const { return std::get<Grid>(v_); }
  const Obj& as_obj() const { return std::get<Obj>(v_); }
  const ColorMap& as_colormap() const { return std::get<ColorMap>(v_); }
  const Motif& as_motif() const { return std::get<Motif>(v_); }
  const Seq& as_seq() const { return std::get<Seq>(v_); }

  // Sequence depth: 0 for scalars.
  int depth() const { return is_seq() ? as_seq().depth : 0; }

  const Variant& raw() const { return v_; }

  bool operator==(const Value& o) const;

 private:
  Variant v_;
};

// Strict total order on values: type tag rank first, then a type-specific
// lexicographic key. Returns <0, 0, >0.
int compare(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return compare(a, b) < 0; }
};

// Elias code length for positive integers: 2*log2(n) + 1 bits.
// Throws std::domain_error for n < 1.
double elias_dl(std::int64_t n);

std::string to_string(const Value& v);
std::string to_string(const Grid& g);
std::string to_string(const Motif& m);

// Convenience constructors.
inline Value int_v(std::int64_t n) { return Value(n); }
inline Value color_v(std::uint8_t c) { return Value(ColorV{c}); }
inline Value vec_v(std::int64_t i, std::int64_t j) { return Value(Vec2{i, j}); }
Value seq_v(int depth, std::vector<Value> items);

// Builds a grid from nested initializer rows; kTransparent entries allowed
// for sprites and masks.
Grid make_grid(GridKind kind, const std::vector<std::vector<int>>& rows);

}  // namespace madil
