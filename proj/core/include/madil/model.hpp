#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "madil/distribution.hpp"
#include "madil/expressions.hpp"
#include "madil/patterns.hpp"

namespace madil {

// --- Models and descriptions ---------------------------------------------

struct ModelNode;
using ModelPtr = std::shared_ptr<const ModelNode>;

struct ModelNode {
  enum class Kind : std::uint8_t { Unknown, Expr, Pattern };
  Kind kind = Kind::Unknown;
  VarId var = 0;
  ExprPtr expr;                 // Kind::Expr
  PatternInstance pat;          // Kind::Pattern
  std::vector<ModelPtr> parts;  // Kind::Pattern

  static ModelPtr unknown(VarId x);
  static ModelPtr expression(VarId x, ExprPtr e);
  static ModelPtr pattern(VarId x, PatternInstance p, std::vector<ModelPtr> parts);
};

struct DescNode;
using DescPtr = std::shared_ptr<const DescNode>;

struct DescNode {
  VarId var = 0;
  Value value;
  bool composite = false;
  PatternInstance pat;         // composite only
  std::vector<DescPtr> parts;  // composite only

  static DescPtr atom(VarId x, Value v);
  static DescPtr comp(VarId x, Value v, PatternInstance p, std::vector<DescPtr> parts);
};

// Task model: input model plus output model whose expressions may reference
// input variables. next_var tracks fresh-variable allocation.
struct TaskModel {
  ModelPtr input;
  ModelPtr output;
  int next_var = 2;

  static TaskModel initial();  // (x: ?, y: ?)
};

struct ExampleDescription {
  DescPtr input;
  DescPtr output;
  double dl = 0;
};

// --- Structure operations -----------------------------------------------

int size(const ModelNode& m);
std::vector<VarId> vars_of(const ModelNode& m);

// x-factor: the subtree rooted at x (nullptr when x is absent).
ModelPtr factor(const ModelPtr& m, VarId x);
DescPtr factor(const DescPtr& d, VarId x);

// x-context: m with the subtree at x reduced to an unknown (atom for
// descriptions). Throws when x is absent.
ModelPtr context(const ModelPtr& m, VarId x);
DescPtr context(const DescPtr& d, VarId x);

// Replaces the subtree at x; the result must stay well-formed (all output
// expression variables still defined by the input model). Throws on
// violations.
TaskModel substitute(const TaskModel& M, VarId x, ModelPtr sub);

bool well_formed(const TaskModel& M);

Environment env_of(const DescNode& d);

// The distribution class of every variable introduced by a model, derived
// by replaying part distributions from the root class.
void var_classes(const ModelNode& m, const DistClass& root,
                 std::map<VarId, DistClass>& out);

// --- Model and expression counting --------------------------------------

class Grammar {
 public:
  struct PatternRule {
    int extra = 0;  // additional symbols carried by the pattern (parameters)
    std::vector<DistClass> parts;
  };
  struct FunctionRule {
    int extra = 0;  // static constant symbols
    std::vector<DistClass> args;
  };
  virtual ~Grammar() = default;
  virtual std::vector<PatternRule> pattern_rules(const DistClass& v) const = 0;
  virtual std::vector<FunctionRule> function_rules(const DistClass& v) const = 0;
};

// The ARC catalog as a counting grammar.
const Grammar& arc_grammar();

// Counts of size-n models / expressions for a value class: an atomic slot
// holds an unknown, a value or a variable; larger sizes distribute the
// remainder over pattern parts or function arguments. Memoized on
// (n, class); counts can be astronomically large, double holds them exactly
// up to 2^53.
class CountingContext {
 public:
  explicit CountingContext(const Grammar& g) : g_(g) {}
  double count_models(int n, const DistClass& v);
  double count_exprs(int n, const DistClass& v);

 private:
  double models_locked(int n, const DistClass& v);
  double exprs_locked(int n, const DistClass& v);

  const Grammar& g_;
  // shared across concurrent task solvers; guarded for insertion
  std::recursive_mutex mu_;
  std::map<std::pair<int, DistClass>, double> memo_m_, memo_e_;
};

// Shared memoized context for the ARC grammar.
CountingContext& arc_counting();

// --- Description lengths -------------------------------------------------

// L(m | V, X): size code + abstract-syntax code + constants and variable
// choices. available lists the environment variables with their classes
// (empty for input models).
double model_dl(const ModelNode& m, const Distribution& V,
                const std::vector<std::pair<VarId, DistClass>>& available);

// L(d | V, m[sigma]): by induction on the shared tree structure.
// Throws on shape mismatch or out-of-support values.
double description_dl(const DescNode& d, const Distribution& V, const ModelNode& m,
                      const Environment& env);

// Root distributions of the ARC task domain (a-priori full grids).
const Distribution& input_root_dist();
const Distribution& output_root_dist();

// --- Text form -----------------------------------------------------------

// Concrete text syntax for task models; deterministic variable naming from part
// names. Round-trips through parse_task_model.
std::map<VarId, std::string> task_model_names(const TaskModel& M);
std::string to_string(const TaskModel& M);
std::string model_to_string(const ModelNode& m, const std::map<VarId, std::string>& names);

// Parses the concrete syntax back. Throws std::runtime_error on bad input.
TaskModel parse_task_model(const std::string& text);

std::string to_string(const DescNode& d, const std::map<VarId, std::string>& names);

}  // namespace madil
