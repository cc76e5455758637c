#pragma once

#include <optional>
#include <string>
#include <vector>

#include "madil/distribution.hpp"
#include "madil/expressions.hpp"
#include "madil/stream.hpp"
#include "madil/values.hpp"

namespace madil {

enum class PatternName : std::uint8_t {
  // fixed-arity patterns by type
  BgColor, Monocolor, MotifP, IsFull, Empty, Full, Point, Segment, Vec, Square,
  Swap, Replace,
  // patterns with sequences of parts
  Objects, Metagrid, ColorRow, ColorCol, ColorMat, AsGrid, DomainMap, Range,
  ObjP, Cons, Repeat,
  // dependent patterns, parameterized by an environment value
  Crop, Recoloring, Index,
};

struct PatternId {
  PatternName name = PatternName::Vec;
  GridKind kind = GridKind::Full;     // whole grid kind, for grid-typed patterns
  int d = 0;                           // Cons_d / Repeat_d axis; Index: depth delta k
  std::vector<std::uint8_t> color_set; // DomainMap_C

  bool operator==(const PatternId&) const = default;
  bool operator<(const PatternId& o) const;
};

// A pattern use site: catalog entry, item-wise lift depth, and the optional
// environment parameter of dependent patterns.
struct PatternInstance {
  PatternId id;
  int lift = 0;
  ExprPtr dep_param;  // set iff id.name is Crop / Recoloring / Index

  bool dependent() const {
    return id.name == PatternName::Crop || id.name == PatternName::Recoloring ||
           id.name == PatternName::Index;
  }
};

int arity(const PatternId& id);
const std::vector<const char*>& part_names(const PatternId& id);

// Serialized name, exactly as in the catalog tables ("BgColor", "Cons_1", ...).
std::string pattern_name(const PatternId& id);

// Deterministic composition: parts -> whole, or nullopt when the parts are
// incompatible. whole_dist provides sequence-length context where the parts
// do not determine it (Range, Repeat).
std::optional<Value> compose(const PatternInstance& P, const Environment& env,
                             const std::vector<Value>& parts,
                             const Distribution* whole_dist = nullptr);

// Non-deterministic decomposition: whole -> stream of part tuples, most
// promising first. Every yielded tuple recomposes to v exactly.
Stream<std::vector<Value>> decompose(const PatternInstance& P, const Environment& env,
                                     const Value& v);

// V_{P,i}(V, v_1..v_{i-1}): the value distribution of part i given the whole
// distribution and the earlier parts.
Distribution part_distribution(const PatternInstance& P, int i, const Distribution& V,
                               const std::vector<Value>& prior);

// True when part i's distribution depends on the concrete earlier parts.
bool part_needs_prior(const PatternId& id, int i);

// False when no completion of the given part prefix can compose (generation
// prunes such prefixes instead of scanning their infinite part streams).
bool prefix_viable(const PatternInstance& P, const std::vector<Value>& prior,
                   const Distribution& V);

// Class-level derivation used by the counting recurrences.
DistClass part_class(const PatternId& id, int i, const DistClass& whole, int lift);

// Catalog patterns whose range intersects the class (dependent patterns
// excluded; they are proposed with an explicit parameter). The returned
// instances carry the lift depth needed for the class.
std::vector<PatternInstance> patterns_for_class(const DistClass& c);

// Patterns with no verification component, used to wrap transitions.
bool pure_decomposition(const PatternId& id);

// True when the pattern can be applied item-wise over sequence layers.
bool liftable(PatternName n);

}  // namespace madil
