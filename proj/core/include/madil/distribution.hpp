#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "madil/stream.hpp"
#include "madil/values.hpp"

namespace madil {

// Nested length skeleton of an n-D sequence. Leaves sit at the scalar level.
struct SeqShape {
  int len = 0;
  std::vector<SeqShape> kids;  // empty when items are scalars (or regular)
  bool operator==(const SeqShape&) const = default;
};

std::optional<SeqShape> shape_of(const Value& v);

// Canonical distribution class used for counting recurrences and variable
// compatibility: (type tag, grid kind, sequence depth + item class).
struct DistClass {
  Tag tag = Tag::Int;
  GridKind kind = GridKind::Full;  // Tag::Grid only
  int depth = 0;                   // sequence layers; scalar item tag below
  Tag item_tag = Tag::Int;         // depth > 0 only
  GridKind item_kind = GridKind::Full;

  bool operator==(const DistClass&) const = default;
  bool operator<(const DistClass& o) const;
  std::string str() const;

  DistClass item() const;               // strip one sequence layer
  DistClass lifted(int layers) const;   // wrap in sequence layers
  static DistClass scalar(Tag t, GridKind k = GridKind::Full);
  static DistClass of(const Value& v);
};

// --- Parameter structs -------------------------------------------------

struct IntDist {
  enum class Coding : std::uint8_t { Uniform, EliasPositive, EliasSigned };
  Coding coding = Coding::Uniform;
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // inclusive support bounds

  static IntDist uniform(std::int64_t lo, std::int64_t hi);
  static IntDist elias(std::int64_t lo = 1, std::int64_t hi = kMaxSide);
  static IntDist any();  // signed elias, unbounded
};

struct ColorDist {
  enum class Bias : std::uint8_t { Uniform, Background, Object };
  std::vector<std::uint8_t> allowed;  // sorted, non-empty
  Bias bias = Bias::Uniform;

  static ColorDist uniform_all();
  static ColorDist background();
  static ColorDist object();
};

struct VecDist {
  IntDist i, j;
};

struct GridDist {
  enum class Content : std::uint8_t { Free, ForcedFull, Sparse };
  GridKind kind = GridKind::Full;
  IntDist hd = IntDist::elias();
  IntDist wd = IntDist::elias();
  std::optional<std::uint8_t> excluded;  // color banned from cells
  Content content = Content::Free;

  int cell_states() const;

  static GridDist full_grid();  // the a-priori ARC grid distribution
  static GridDist sprite(IntDist hd = IntDist::elias(), IntDist wd = IntDist::elias());
  static GridDist mask(IntDist hd = IntDist::elias(), IntDist wd = IntDist::elias());
};

struct MotifDist {};

struct ColorMapDist {};

class Distribution;
using DistPtr = std::shared_ptr<const Distribution>;

struct ObjDist {
  VecDist pos;
  GridDist sprite;
};

struct SeqDist {
  int depth = 1;
  DistPtr item;  // scalar distribution at the leaves
  std::optional<SeqShape> shape;
};

struct SingletonDist {
  Value v;
};

// --- Distribution --------------------------------------------------------

// A describable value population: a probability mass function presented as
// a description-length function, plus lazy support enumeration in ascending
// (dl, total order).
class Distribution {
 public:
  using Variant = std::variant<IntDist, ColorDist, VecDist, GridDist, ObjDist,
                               ColorMapDist, MotifDist, SeqDist, SingletonDist>;

  Distribution() : v_(IntDist::any()) {}
  Distribution(IntDist d) : v_(d) {}
  Distribution(ColorDist d) : v_(std::move(d)) {}
  Distribution(VecDist d) : v_(d) {}
  Distribution(GridDist d) : v_(d) {}
  Distribution(ObjDist d) : v_(d) {}
  Distribution(ColorMapDist d) : v_(d) {}
  Distribution(MotifDist d) : v_(d) {}
  Distribution(SeqDist d) : v_(std::move(d)) {}
  Distribution(SingletonDist d) : v_(std::move(d)) {}

  // -log2 f_V(v); nullopt when v is outside the support.
  std::optional<double> dl(const Value& v) const;

  bool contains(const Value& v) const { return dl(v).has_value(); }

  // Lazy enumeration in ascending (dl, total order). May be infinite; for
  // sequence distributions a shape is required (empty stream otherwise).
  Stream<Value> enumerate() const;

  // True when the support is finite and enumerate() terminates.
  bool finite_support() const;

  DistClass klass() const;

  int depth() const;

  template <typename T>
  const T* get() const { return std::get_if<T>(&v_); }

  const Variant& raw() const { return v_; }

  static DistPtr make(Variant v);

 private:
  Variant v_;
};

// value_dl operation: throws UndefinedValueError when v is not in support.
struct UndefinedValueError : std::runtime_error {
  explicit UndefinedValueError(const std::string& what) : std::runtime_error(what) {}
};

double value_dl(const Value& v, const Distribution& V);

// Wraps a scalar distribution in `layers` sequence layers.
DistPtr lift_dist(DistPtr item, int layers, std::optional<SeqShape> shape = std::nullopt);

}  // namespace madil
