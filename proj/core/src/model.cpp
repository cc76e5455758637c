#include "madil/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace madil {

ModelPtr ModelNode::unknown(VarId x) {
  auto m = std::make_shared<ModelNode>();
  m->kind = Kind::Unknown;
  m->var = x;
  return m;
}

ModelPtr ModelNode::expression(VarId x, ExprPtr e) {
  auto m = std::make_shared<ModelNode>();
  m->kind = Kind::Expr;
  m->var = x;
  m->expr = std::move(e);
  return m;
}

ModelPtr ModelNode::pattern(VarId x, PatternInstance p, std::vector<ModelPtr> parts) {
  if (static_cast<int>(parts.size()) != arity(p.id))
    throw std::invalid_argument("pattern node: arity mismatch for " + pattern_name(p.id));
  auto m = std::make_shared<ModelNode>();
  m->kind = Kind::Pattern;
  m->var = x;
  m->pat = std::move(p);
  m->parts = std::move(parts);
  return m;
}

DescPtr DescNode::atom(VarId x, Value v) {
  auto d = std::make_shared<DescNode>();
  d->var = x;
  d->value = std::move(v);
  return d;
}

DescPtr DescNode::comp(VarId x, Value v, PatternInstance p, std::vector<DescPtr> parts) {
  auto d = std::make_shared<DescNode>();
  d->var = x;
  d->value = std::move(v);
  d->composite = true;
  d->pat = std::move(p);
  d->parts = std::move(parts);
  return d;
}

TaskModel TaskModel::initial() {
  TaskModel M;
  M.input = ModelNode::unknown(0);
  M.output = ModelNode::unknown(1);
  M.next_var = 2;
  return M;
}

// --- structure ops -------------------------------------------------------

int size(const ModelNode& m) {
  switch (m.kind) {
    case ModelNode::Kind::Unknown:
      return 1;
    case ModelNode::Kind::Expr:
      return size(*m.expr);
    case ModelNode::Kind::Pattern: {
      int n = 1 + (m.pat.dep_param ? size(*m.pat.dep_param) : 0);
      for (const auto& p : m.parts) n += size(*p);
      return n;
    }
  }
  return 1;
}

std::vector<VarId> vars_of(const ModelNode& m) {
  std::vector<VarId> out;
  std::function<void(const ModelNode&)> rec = [&](const ModelNode& n) {
    out.push_back(n.var);
    if (n.kind == ModelNode::Kind::Pattern)
      for (const auto& p : n.parts) rec(*p);
  };
  rec(m);
  return out;
}

ModelPtr factor(const ModelPtr& m, VarId x) {
  if (!m) return nullptr;
  if (m->var == x) return m;
  if (m->kind == ModelNode::Kind::Pattern)
    for (const auto& p : m->parts)
      if (auto f = factor(p, x)) return f;
  return nullptr;
}

DescPtr factor(const DescPtr& d, VarId x) {
  if (!d) return nullptr;
  if (d->var == x) return d;
  if (d->composite)
    for (const auto& p : d->parts)
      if (auto f = factor(p, x)) return f;
  return nullptr;
}

ModelPtr context(const ModelPtr& m, VarId x) {
  std::function<ModelPtr(const ModelPtr&, bool&)> rec = [&](const ModelPtr& n,
                                                            bool& found) -> ModelPtr {
    if (n->var == x) {
      found = true;
      return ModelNode::unknown(x);
    }
    if (n->kind != ModelNode::Kind::Pattern) return n;
    std::vector<ModelPtr> parts;
    bool changed = false;
    for (const auto& p : n->parts) {
      bool f = false;
      auto np = rec(p, f);
      changed |= f;
      found |= f;
      parts.push_back(f ? np : p);
    }
    if (!changed) return n;
    return ModelNode::pattern(n->var, n->pat, std::move(parts));
  };
  bool found = false;
  auto out = rec(m, found);
  if (!found) throw std::invalid_argument("context: variable not present in model");
  return out;
}

DescPtr context(const DescPtr& d, VarId x) {
  std::function<DescPtr(const DescPtr&, bool&)> rec = [&](const DescPtr& n,
                                                          bool& found) -> DescPtr {
    if (n->var == x) {
      found = true;
      return DescNode::atom(x, n->value);
    }
    if (!n->composite) return n;
    std::vector<DescPtr> parts;
    bool changed = false;
    for (const auto& p : n->parts) {
      bool f = false;
      auto np = rec(p, f);
      changed |= f;
      found |= f;
      parts.push_back(f ? np : p);
    }
    if (!changed) return n;
    return DescNode::comp(n->var, n->value, n->pat, std::move(parts));
  };
  bool found = false;
  auto out = rec(d, found);
  if (!found) throw std::invalid_argument("context: variable not present in description");
  return out;
}

namespace {

ModelPtr replace_at(const ModelPtr& m, VarId x, const ModelPtr& sub, bool& found) {
  if (m->var == x) {
    found = true;
    return sub;
  }
  if (m->kind != ModelNode::Kind::Pattern) return m;
  std::vector<ModelPtr> parts;
  bool changed = false;
  for (const auto& p : m->parts) {
    bool f = false;
    auto np = replace_at(p, x, sub, f);
    changed |= f;
    found |= f;
    parts.push_back(f ? np : p);
  }
  if (!changed) return m;
  return ModelNode::pattern(m->var, m->pat, std::move(parts));
}

void expr_refs(const ModelNode& m, std::vector<VarId>& out) {
  if (m.kind == ModelNode::Kind::Expr) {
    for (VarId v : free_vars(*m.expr)) out.push_back(v);
  } else if (m.kind == ModelNode::Kind::Pattern) {
    if (m.pat.dep_param)
      for (VarId v : free_vars(*m.pat.dep_param)) out.push_back(v);
    for (const auto& p : m.parts) expr_refs(*p, out);
  }
}

}  // namespace

bool well_formed(const TaskModel& M) {
  auto in_vars = vars_of(*M.input);
  auto out_vars = vars_of(*M.output);
  // unique variable names across the task model
  std::vector<VarId> all = in_vars;
  all.insert(all.end(), out_vars.begin(), out_vars.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) return false;
  // input expressions are closed (no variables available)
  std::vector<VarId> refs;
  expr_refs(*M.input, refs);
  if (!refs.empty()) return false;
  // output expressions reference input variables only
  refs.clear();
  expr_refs(*M.output, refs);
  for (VarId r : refs)
    if (std::find(in_vars.begin(), in_vars.end(), r) == in_vars.end()) return false;
  return true;
}

TaskModel substitute(const TaskModel& M, VarId x, ModelPtr sub) {
  if (sub->var != x) throw std::invalid_argument("substitute: submodel root must keep the variable");
  TaskModel out = M;
  bool found = false;
  out.input = replace_at(M.input, x, sub, found);
  if (!found) {
    out.output = replace_at(M.output, x, sub, found);
  }
  if (!found) throw std::invalid_argument("substitute: variable not present");
  if (!well_formed(out))
    throw std::invalid_argument("substitute: result is not well-formed");
  return out;
}

Environment env_of(const DescNode& d) {
  Environment env;
  std::function<void(const DescNode&)> rec = [&](const DescNode& n) {
    env.bind(n.var, n.value);
    if (n.composite)
      for (const auto& p : n.parts) rec(*p);
  };
  rec(d);
  return env;
}

void var_classes(const ModelNode& m, const DistClass& root, std::map<VarId, DistClass>& out) {
  out[m.var] = root;
  if (m.kind != ModelNode::Kind::Pattern) return;
  for (size_t i = 0; i < m.parts.size(); ++i) {
    DistClass pc = part_class(m.pat.id, static_cast<int>(i), root, m.pat.lift);
    var_classes(*m.parts[i], pc, out);
  }
}

// --- ARC grammar and counting ---------------------------------------------

namespace {

// Result class of a function on an argument class; mirrors apply_lifted.
std::optional<DistClass> fn_result_class(const FunctionId& f, const DistClass& arg) {
  int nd = natural_depth(f.fn);
  if (arg.depth > nd) {
    DistClass inner = arg;
    for (int k = 0; k < arg.depth - nd; ++k) inner = inner.item();
    auto r = fn_result_class(f, inner);
    if (!r) return std::nullopt;
    return r->lifted(arg.depth - nd);
  }
  if (arg.depth != nd) return std::nullopt;
  auto S = [](Tag t, GridKind k = GridKind::Full) { return DistClass::scalar(t, k); };
  Tag item = arg.depth > 0 ? arg.item_tag : arg.tag;
  GridKind ikind = arg.depth > 0 ? arg.item_kind : arg.kind;
  bool is_grid = item == Tag::Grid;
  switch (f.fn) {
    case Fn::Add: case Fn::Sub: case Fn::Mul: case Fn::Div:
      return item == Tag::Int ? std::optional(S(Tag::Int)) : std::nullopt;
    case Fn::VAdd: case Fn::VSub: case Fn::VMul: case Fn::VDiv: case Fn::VSwap:
      return item == Tag::Vec ? std::optional(S(Tag::Vec)) : std::nullopt;
    case Fn::CompI: case Fn::CompJ:
      return item == Tag::Vec ? std::optional(S(Tag::Int)) : std::nullopt;
    case Fn::Size:
      return is_grid ? std::optional(S(Tag::Vec)) : std::nullopt;
    case Fn::Area:
      return is_grid ? std::optional(S(Tag::Int)) : std::nullopt;
    case Fn::ColorCount:
      return is_grid && ikind != GridKind::Mask ? std::optional(S(Tag::Int)) : std::nullopt;
    case Fn::MajorityColor: case Fn::MinorityColor:
      return is_grid && ikind != GridKind::Mask ? std::optional(S(Tag::Color)) : std::nullopt;
    case Fn::HalfTop: case Fn::HalfBottom: case Fn::HalfLeft: case Fn::HalfRight:
    case Fn::QuadTL: case Fn::QuadTR: case Fn::QuadBL: case Fn::QuadBR:
      return is_grid ? std::optional(S(Tag::Grid, ikind)) : std::nullopt;
    case Fn::ContentOf:
      return is_grid && ikind == GridKind::Sprite ? std::optional(S(Tag::Obj)) : std::nullopt;
    case Fn::MaskOf:
      return is_grid && ikind != GridKind::Mask
                 ? std::optional(S(Tag::Grid, GridKind::Mask)) : std::nullopt;
    case Fn::NotMask: case Fn::Neigh4: case Fn::Neigh8:
      return is_grid && ikind == GridKind::Mask
                 ? std::optional(S(Tag::Grid, GridKind::Mask)) : std::nullopt;
    case Fn::Compress: case Fn::SelfCompose:
      return is_grid && ikind == GridKind::Full
                 ? std::optional(S(Tag::Grid, GridKind::Full)) : std::nullopt;
    case Fn::ApplySym: case Fn::UnfoldSym:
      return is_grid ? std::optional(S(Tag::Grid, ikind)) : std::nullopt;
    case Fn::CloseSym: case Fn::BorderOf: case Fn::InteriorOf:
      return is_grid && ikind != GridKind::Full
                 ? std::optional(S(Tag::Grid, ikind)) : std::nullopt;
    case Fn::PosOf:
      return item == Tag::Obj ? std::optional(S(Tag::Vec)) : std::nullopt;
    case Fn::SpriteOf:
      return item == Tag::Obj ? std::optional(S(Tag::Grid, GridKind::Sprite)) : std::nullopt;
    case Fn::TopOf: case Fn::BottomOf: case Fn::LeftOf: case Fn::RightOf:
    case Fn::MiddleRowOf: case Fn::MiddleColOf:
      return item == Tag::Obj ? std::optional(S(Tag::Int)) : std::nullopt;
    case Fn::Length:
      return S(Tag::Int);
    case Fn::TailSeq: case Fn::ReverseSeq: case Fn::RotateSeq:
      return arg;
    case Fn::Transpose2D:
      return arg;
    case Fn::Flatten2D:
      return S(item, ikind).lifted(1);
    case Fn::SumSeq: case Fn::MinSeq: case Fn::MaxSeq: case Fn::ArgMin: case Fn::ArgMax:
      return item == Tag::Int ? std::optional(S(Tag::Int)) : std::nullopt;
    case Fn::MostCommon: case Fn::LeastCommon: case Fn::IndexSeq:
      return S(item, ikind);
    case Fn::Index2D:
      return S(item, ikind);
    case Fn::AndMasks: case Fn::OrMasks: case Fn::XorMasks:
      return is_grid && ikind == GridKind::Mask
                 ? std::optional(S(Tag::Grid, GridKind::Mask)) : std::nullopt;
    case Fn::ColorsOf:
      return is_grid && ikind != GridKind::Mask
                 ? std::optional(S(Tag::Color).lifted(1)) : std::nullopt;
    case Fn::GridOfColorRow:
      return item == Tag::Color ? std::optional(S(Tag::Grid, GridKind::Full)) : std::nullopt;
  }
  return std::nullopt;
}

class ArcGrammar : public Grammar {
 public:
  std::vector<PatternRule> pattern_rules(const DistClass& v) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = pat_cache_.find(v);
    if (it != pat_cache_.end()) return it->second;
    std::vector<PatternRule> rules;
    for (const PatternInstance& p : patterns_for_class(v)) {
      PatternRule r;
      for (int i = 0; i < arity(p.id); ++i) r.parts.push_back(part_class(p.id, i, v, p.lift));
      if (r.parts.empty()) continue;  // size-1 models are the unknowns and atomic expressions
      rules.push_back(std::move(r));
    }
    // Dependent patterns: one parameter symbol each.
    if (v.depth == 0 && v.tag == Tag::Grid) {
      rules.push_back({1, {DistClass::scalar(Tag::Vec), DistClass::scalar(Tag::Vec)}});  // Crop
      if (v.kind != GridKind::Mask)
        rules.push_back({1, {DistClass::scalar(Tag::ColorMap)}});  // Recoloring
    }
    rules.push_back({1, {DistClass::scalar(Tag::Int).lifted(1)}});  // Index
    if (v.depth == 0 && v.tag == Tag::ColorMap)
      rules.push_back({0, {DistClass::scalar(Tag::Color).lifted(1)}});  // DomainMap family
    pat_cache_[v] = rules;
    return rules;
  }

  std::vector<FunctionRule> function_rules(const DistClass& v) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = fn_cache_.find(v);
    if (it != fn_cache_.end()) return it->second;
    std::vector<FunctionRule> rules;
    for (const FunctionId& f : arc_functions()) {
      for (const DistClass& arg : universe()) {
        auto r = fn_result_class(f, arg);
        if (r && *r == v) rules.push_back({static_count(f.fn), {arg}});
      }
    }
    fn_cache_[v] = rules;
    return rules;
  }

 private:
  static const std::vector<DistClass>& universe() {
    static const std::vector<DistClass> u = [] {
      std::vector<DistClass> out;
      std::vector<DistClass> scalars = {
          DistClass::scalar(Tag::Int), DistClass::scalar(Tag::Color),
          DistClass::scalar(Tag::Vec), DistClass::scalar(Tag::Grid, GridKind::Full),
          DistClass::scalar(Tag::Grid, GridKind::Sprite),
          DistClass::scalar(Tag::Grid, GridKind::Mask), DistClass::scalar(Tag::Obj),
          DistClass::scalar(Tag::ColorMap), DistClass::scalar(Tag::Motif)};
      for (const auto& s : scalars) {
        out.push_back(s);
        if (s.tag != Tag::ColorMap && s.tag != Tag::Motif) {
          out.push_back(s.lifted(1));
          out.push_back(s.lifted(2));
        }
      }
      return out;
    }();
    return u;
  }

  mutable std::mutex mu_;
  mutable std::map<DistClass, std::vector<PatternRule>> pat_cache_;
  mutable std::map<DistClass, std::vector<FunctionRule>> fn_cache_;
};

}  // namespace

const Grammar& arc_grammar() {
  static ArcGrammar g;
  return g;
}

namespace {

// Sum over ordered compositions of `total` into the given classes of the
// product of per-part counts.
double compositions(int total, const std::vector<DistClass>& parts, size_t i,
                    const std::function<double(int, const DistClass&)>& cnt) {
  if (i == parts.size()) return total == 0 ? 1.0 : 0.0;
  int remaining_parts = static_cast<int>(parts.size() - i - 1);
  double sum = 0;
  for (int t = 1; t + remaining_parts <= total; ++t) {
    double c = cnt(t, parts[i]);
    if (c > 0) sum += c * compositions(total - t, parts, i + 1, cnt);
  }
  return sum;
}

}  // namespace

double CountingContext::count_exprs(int n, const DistClass& v) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return exprs_locked(n, v);
}

double CountingContext::count_models(int n, const DistClass& v) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return models_locked(n, v);
}

double CountingContext::exprs_locked(int n, const DistClass& v) {
  if (n < 1) return 0;
  if (n == 1) return 2;  // a constant value or a variable
  auto key = std::make_pair(n, v);
  auto it = memo_e_.find(key);
  if (it != memo_e_.end()) return it->second;
  memo_e_[key] = 0;  // cut recursion cycles
  double total = 0;
  for (const auto& rule : g_.function_rules(v)) {
    int budget = n - 1 - rule.extra;
    if (budget < static_cast<int>(rule.args.size())) continue;
    total += compositions(budget, rule.args, 0,
                          [this](int t, const DistClass& c) { return exprs_locked(t, c); });
  }
  memo_e_[key] = total;
  return total;
}

double CountingContext::models_locked(int n, const DistClass& v) {
  if (n < 1) return 0;
  if (n == 1) return 1 + exprs_locked(1, v);
  auto key = std::make_pair(n, v);
  auto it = memo_m_.find(key);
  if (it != memo_m_.end()) return it->second;
  memo_m_[key] = 0;
  double total = exprs_locked(n, v);
  for (const auto& rule : g_.pattern_rules(v)) {
    int budget = n - 1 - rule.extra;
    if (budget < static_cast<int>(rule.parts.size())) continue;
    total += compositions(budget, rule.parts, 0,
                          [this](int t, const DistClass& c) { return models_locked(t, c); });
  }
  memo_m_[key] = total;
  return total;
}

CountingContext& arc_counting() {
  static CountingContext ctx(arc_grammar());
  return ctx;
}

// --- description lengths ---------------------------------------------------

namespace {

double static_dl(const FunctionId& f) {
  switch (f.fn) {
    case Fn::Add: case Fn::Sub: case Fn::VAdd: case Fn::VSub:
      return std::log2(3.0);
    case Fn::Mul: case Fn::Div: case Fn::VMul: case Fn::VDiv:
      return 1.0;
    case Fn::ApplySym: return 3.0;
    case Fn::CloseSym: return 2.0;
    case Fn::UnfoldSym: return std::log2(3.0);
    case Fn::SelfCompose: return std::log2(10.0);
    case Fn::IndexSeq: return 1.0;
    default: return 0.0;
  }
}

// Fallback code for constants nested inside expressions.
double natural_dl(const Value& v) {
  switch (v.tag()) {
    case Tag::Int: return 1.0 + elias_dl(std::llabs(v.as_int()) + 1);
    case Tag::Color: return std::log2(10.0);
    case Tag::Vec:
      return 2.0 + elias_dl(std::llabs(v.as_vec().i) + 1) + elias_dl(std::llabs(v.as_vec().j) + 1);
    case Tag::Grid: {
      Distribution d{GridDist{v.as_grid().kind}};
      auto b = d.dl(v);
      return b ? *b : 1e6;
    }
    case Tag::Motif: {
      Distribution d{MotifDist{}};
      auto b = d.dl(v);
      return b ? *b : 1e6;
    }
    case Tag::ColorMap: {
      Distribution d{ColorMapDist{}};
      auto b = d.dl(v);
      return b ? *b : 1e6;
    }
    default: {
      if (v.is_seq()) {
        double bits = 0;
        for (const Value& x : v.as_seq().get()) bits += natural_dl(x);
        return bits;
      }
      if (v.is_obj())
        return natural_dl(Value(v.as_obj().pos)) + natural_dl(Value(v.as_obj().sprite));
      return 1e6;
    }
  }
}

double var_choice_dl(VarId x, const std::vector<std::pair<VarId, DistClass>>& available) {
  const DistClass* cls = nullptr;
  for (const auto& [v, c] : available)
    if (v == x) cls = &c;
  if (!cls) throw std::invalid_argument("model_dl: expression references an unknown variable");
  int compatible = 0;
  for (const auto& [v, c] : available) compatible += (c == *cls);
  return std::log2(std::max(1, compatible));
}

// Constant, variable-choice and static-argument bits of an expression.
double expr_content_dl(const Expression& e, const Distribution* root_dist,
                       const std::vector<std::pair<VarId, DistClass>>& available) {
  if (e.is_const()) {
    const Value& v = std::get<Value>(e.node);
    if (root_dist) {
      if (auto b = root_dist->dl(v)) return *b;
    }
    return natural_dl(v);
  }
  if (e.is_var()) return var_choice_dl(std::get<VarId>(e.node), available);
  const auto& app = std::get<Expression::App>(e.node);
  double bits = static_dl(app.fn);
  for (const auto& a : app.args) bits += expr_content_dl(*a, nullptr, available);
  return bits;
}

double model_content_dl(const ModelNode& m, const Distribution& V,
                        const std::vector<std::pair<VarId, DistClass>>& available) {
  switch (m.kind) {
    case ModelNode::Kind::Unknown:
      return 0;
    case ModelNode::Kind::Expr:
      return expr_content_dl(*m.expr, &V, available);
    case ModelNode::Kind::Pattern: {
      double bits = 0;
      if (m.pat.dep_param) bits += expr_content_dl(*m.pat.dep_param, nullptr, available);
      if (m.pat.id.name == PatternName::DomainMap) bits += kNumColors;  // the fixed set C
      for (size_t i = 0; i < m.parts.size(); ++i) {
        Distribution Vi = part_distribution(m.pat, static_cast<int>(i), V, {});
        bits += model_content_dl(*m.parts[i], Vi, available);
      }
      return bits;
    }
  }
  return 0;
}

}  // namespace

double model_dl(const ModelNode& m, const Distribution& V,
                const std::vector<std::pair<VarId, DistClass>>& available) {
  int n = size(m);
  double count = arc_counting().count_models(n, V.klass());
  double syntax = count > 0 ? std::log2(count) : 0.0;
  return elias_dl(n) + syntax + model_content_dl(m, V, available);
}

double description_dl(const DescNode& d, const Distribution& V, const ModelNode& m,
                      const Environment& env) {
  switch (m.kind) {
    case ModelNode::Kind::Unknown: {
      if (d.composite) throw std::invalid_argument("description_dl: shape mismatch (atom expected)");
      return value_dl(d.value, V);
    }
    case ModelNode::Kind::Expr: {
      if (d.composite) throw std::invalid_argument("description_dl: shape mismatch (atom expected)");
      return 0.0;
    }
    case ModelNode::Kind::Pattern: {
      if (!d.composite || !(d.pat.id == m.pat.id) || d.pat.lift != m.pat.lift ||
          d.parts.size() != m.parts.size())
        throw std::invalid_argument("description_dl: shape mismatch (pattern expected)");
      double bits = 0;
      std::vector<Value> prior;
      for (size_t i = 0; i < m.parts.size(); ++i) {
        Distribution Vi = part_distribution(m.pat, static_cast<int>(i), V, prior);
        bits += description_dl(*d.parts[i], Vi, *m.parts[i], env);
        prior.push_back(d.parts[i]->value);
      }
      return bits;
    }
  }
  return 0;
}

const Distribution& input_root_dist() {
  static const Distribution d{GridDist::full_grid()};
  return d;
}

const Distribution& output_root_dist() {
  static const Distribution d{GridDist::full_grid()};
  return d;
}

}  // namespace madil
