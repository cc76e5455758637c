#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "madil/distribution.hpp"
#include "madil/grid_ops.hpp"
#include "madil/values.hpp"

namespace madil {

using VarId = std::int32_t;

// Partial mapping from variables to values. Unbound lookups are undefined,
// never defaulted.
class Environment {
 public:
  std::optional<Value> lookup(VarId x) const {
    auto it = vars_.find(x);
    if (it == vars_.end()) return std::nullopt;
    return it->second;
  }
  void bind(VarId x, Value v) { vars_.insert_or_assign(x, std::move(v)); }
  bool has(VarId x) const { return vars_.count(x) > 0; }
  size_t size() const { return vars_.size(); }
  const std::map<VarId, Value>& bindings() const { return vars_; }

 private:
  std::map<VarId, Value> vars_;
};

// --- Function catalog ---------------------------------------------------

enum class Fn : std::uint8_t {
  // arithmetic
  Add, Sub, Mul, Div,          // int, static constant k
  VAdd, VSub, VMul, VDiv,      // vec, static k applied to both components
  CompI, CompJ,                // vec -> int
  VSwap,                       // vec -> vec, swapped components
  // geometry
  Size, Area, ColorCount, MajorityColor, MinorityColor,
  HalfTop, HalfBottom, HalfLeft, HalfRight,
  QuadTL, QuadTR, QuadBL, QuadBR,
  ContentOf,                   // sprite -> object (bbox position + trimmed sprite)
  MaskOf, NotMask, Compress,
  ApplySym,                    // static sym
  CloseSym,                    // static sym, overlay of grid and its image
  UnfoldSym,                   // static sym in {FlipH, FlipV, Rot180(=HV)}; doubling unfold
  SelfCompose,                 // static color: replace cells of that color by the grid
  // objects
  PosOf, SpriteOf, TopOf, BottomOf, LeftOf, RightOf, MiddleRowOf, MiddleColOf,
  BorderOf, InteriorOf, Neigh4, Neigh8,
  // sequences
  Length, TailSeq, ReverseSeq, RotateSeq, Transpose2D, Flatten2D,
  SumSeq, MinSeq, MaxSeq, ArgMin, ArgMax, MostCommon, LeastCommon,
  IndexSeq,                    // static index in {0, -1}
  Index2D,                     // fixed index (0, 0)
  AndMasks, OrMasks, XorMasks,
  ColorsOf,                    // grid -> [Color], descending frequency
  GridOfColorRow,              // [Color] -> 1xN full grid
};

// Function with its static constant arguments resolved (k, symmetry, color,
// index literal); in practice functions take one variable argument.
struct FunctionId {
  Fn fn = Fn::Add;
  int k = 0;  // meaning depends on fn

  bool operator==(const FunctionId&) const = default;
  bool operator<(const FunctionId& o) const {
    return std::tuple(static_cast<int>(fn), k) < std::tuple(static_cast<int>(o.fn), o.k);
  }
};

// Number of static constant symbols carried by the function (for sizes/DL).
int static_count(Fn f);

// Natural depth of the primary argument (0 scalar, 1 sequence, 2 matrix).
int natural_depth(Fn f);

std::string fn_name(const FunctionId& f);

// All concrete function instances of the ARC catalog.
const std::vector<FunctionId>& arc_functions();

// Applies a function at its natural depth. nullopt = undefined.
std::optional<Value> apply_function(const FunctionId& f, const Value& arg);

// Item-wise lifting: arguments deeper than the natural depth are mapped.
std::optional<Value> apply_lifted(const FunctionId& f, const Value& arg);

// --- Expressions -----------------------------------------------------------

struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

struct Expression {
  struct App {
    FunctionId fn;
    std::vector<ExprPtr> args;  // dynamic arguments (one, in practice)
  };
  std::variant<Value, VarId, App> node;

  static ExprPtr constant(Value v);
  static ExprPtr var(VarId x);
  static ExprPtr app(FunctionId f, std::vector<ExprPtr> args);

  bool is_const() const { return node.index() == 0; }
  bool is_var() const { return node.index() == 1; }
  bool is_app() const { return node.index() == 2; }
};

// Number of symbols: values, variables, functions with their static
// constants.
int size(const Expression& e);

// Free variables, in first-occurrence order.
std::vector<VarId> free_vars(const Expression& e);

std::optional<Value> eval(const Expression& e, const Environment& env);

using VarNamer = std::function<std::string(VarId)>;
std::string to_string(const Expression& e, const VarNamer& namer = nullptr);

bool equal(const Expression& a, const Expression& b);

// --- Expression DAG ----------------------------------------------------

// Bottom-up, size-bounded enumeration of expressions over a variable
// signature, indexed by their value vector (one value per example
// environment). Deduplicates nodes with identical value vectors, keeping the
// smallest expression.
class ExprDAG {
 public:
  struct Node {
    ExprPtr expr;
    int size = 0;
    std::vector<Value> values;  // one per example environment
  };

  // envs must share a variable signature. vars lists the variables to seed.
  static ExprDAG build(const std::vector<Environment>& envs,
                       const std::vector<VarId>& vars, int max_size, int max_nodes);

  // Expressions whose value vector equals target exactly, smallest first.
  std::vector<ExprPtr> lookup(const std::vector<Value>& target) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  bool truncated() const { return truncated_; }
  size_t example_count() const { return n_examples_; }

 private:
  struct VecLess {
    bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const;
  };
  std::vector<Node> nodes_;
  std::map<std::vector<Value>, std::vector<size_t>, VecLess> index_;
  size_t n_examples_ = 0;
  bool truncated_ = false;
};

}  // namespace madil
