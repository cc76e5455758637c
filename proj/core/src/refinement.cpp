#include "madil/refinement.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace madil {

std::string canonical_key(const ModelNode& m) {
  std::ostringstream os;
  std::function<void(const ModelNode&)> rec = [&](const ModelNode& n) {
    switch (n.kind) {
      case ModelNode::Kind::Unknown:
        os << '?';
        break;
      case ModelNode::Kind::Expr:
        os << to_string(*n.expr);
        break;
      case ModelNode::Kind::Pattern: {
        os << pattern_name(n.pat.id);
        if (n.pat.lift) os << '^' << n.pat.lift;
        if (n.pat.dep_param) os << '[' << to_string(*n.pat.dep_param) << ']';
        os << '(';
        for (size_t i = 0; i < n.parts.size(); ++i) {
          if (i) os << ',';
          rec(*n.parts[i]);
        }
        os << ')';
        break;
      }
    }
  };
  rec(m);
  return os.str();
}

namespace {

// First parse result of v under a fresh-unknowns submodel; the pattern
// candidate's local description DL l'.
std::optional<double> first_parse_dl(const Distribution& V, const ModelPtr& m,
                                     const Environment& env, const Value& v) {
  auto s = parse(V, m, env, v);
  auto first = s.next();
  if (!first) return std::nullopt;
  return first->dl;
}

ModelPtr fresh_pattern_model(VarId root, PatternInstance inst, int* next_var) {
  std::vector<ModelPtr> parts;
  for (int i = 0; i < arity(inst.id); ++i) parts.push_back(ModelNode::unknown((*next_var)++));
  return ModelNode::pattern(root, std::move(inst), std::move(parts));
}

// Expression lookup by value for the current environment.
std::vector<ExprPtr> matching_exprs(const SubmodelContext& ctx, const Value& v) {
  std::vector<std::pair<int, ExprPtr>> found;
  if (!ctx.dag || !ctx.expr_values) return {};
  const auto& nodes = ctx.dag->nodes();
  for (size_t n = 0; n < nodes.size(); ++n) {
    if (n >= ctx.expr_values->size()) break;
    if (compare((*ctx.expr_values)[n], v) == 0)
      found.push_back({nodes[n].size, nodes[n].expr});
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ExprPtr> out;
  for (auto& [s, e] : found) out.push_back(e);
  return out;
}

// Wraps the value's pure decompositions around expression submodels:
// P(..., e, ...) with unknowns at the unmatched parts.
void wrap_candidates(const Value& v, const Distribution& V, const SubmodelContext& ctx,
                     VarId root, int budget,
                     std::vector<std::pair<ModelPtr, bool>>& out) {
  if (budget <= 0) return;
  for (const PatternInstance& p : patterns_for_class(V.klass())) {
    if (!pure_decomposition(p.id)) continue;
    PatternInstance inst = p;
    auto tuple = decompose(inst, *ctx.env, v).next();
    if (!tuple) continue;
    std::vector<Value> prior;
    std::vector<ModelPtr> parts;
    bool any_expr = false;
    for (size_t i = 0; i < tuple->size(); ++i) {
      const Value& pv = (*tuple)[i];
      auto exprs = matching_exprs(ctx, pv);
      if (!exprs.empty()) {
        parts.push_back(ModelNode::expression((*ctx.next_var)++, exprs.front()));
        any_expr = true;
      } else {
        // one level of recursive wrapping for the unmatched part
        std::vector<std::pair<ModelPtr, bool>> deeper;
        Distribution Vi = part_distribution(inst, static_cast<int>(i), V, prior);
        wrap_candidates(pv, Vi, ctx, (*ctx.next_var)++, budget - 1, deeper);
        ModelPtr chosen = nullptr;
        for (auto& [dm, de] : deeper)
          if (de) { chosen = dm; break; }
        if (chosen) {
          parts.push_back(chosen);
          any_expr = true;
        } else {
          parts.push_back(ModelNode::unknown((*ctx.next_var)++));
        }
      }
      prior.push_back(pv);
    }
    out.push_back({ModelNode::pattern(root, inst, std::move(parts)), any_expr});
  }
}

}  // namespace

std::vector<std::pair<ModelPtr, double>> submodels(const ModelNode& m, const Distribution& V,
                                                   const DescNode& d, double L,
                                                   const SubmodelContext& ctx) {
  std::vector<std::pair<ModelPtr, double>> out;
  const Value& v = d.value;
  double l = ctx.alpha * description_dl(d, V, m, *ctx.env);

  // 1. the constant value
  out.push_back({ModelNode::expression(m.var, Expression::constant(v)), L - l});

  // 2. expressions evaluating to v (output side only; inputs have no env)
  for (const ExprPtr& e : matching_exprs(ctx, v))
    out.push_back({ModelNode::expression(m.var, e), L - l});

  // 3. pattern-based submodels that can parse v
  DistClass cls = V.klass();
  std::vector<PatternInstance> cands = patterns_for_class(cls);
  if (ctx.output_side && ctx.input_vars) {
    // dependent patterns, parameterized by input variables
    for (const auto& [y, yc] : *ctx.input_vars) {
      if (cls.depth == 0 && cls.tag == Tag::Grid && yc.depth == 0 && yc.tag == Tag::Grid &&
          yc.kind == cls.kind) {
        PatternInstance crop;
        crop.id.name = PatternName::Crop;
        crop.id.kind = cls.kind;
        crop.dep_param = Expression::var(y);
        cands.push_back(crop);
        if (cls.kind != GridKind::Mask) {
          PatternInstance reco;
          reco.id.name = PatternName::Recoloring;
          reco.id.kind = cls.kind;
          reco.dep_param = Expression::var(y);
          cands.push_back(reco);
        }
      }
      if (yc.depth > cls.depth) {
        bool same_item = cls.depth == 0
                             ? (yc.item_tag == cls.tag && (cls.tag != Tag::Grid || yc.item_kind == cls.kind))
                             : (yc.item_tag == cls.item_tag && yc.item_kind == cls.item_kind);
        if (same_item) {
          PatternInstance idx;
          idx.id.name = PatternName::Index;
          idx.id.d = yc.depth - cls.depth;
          idx.dep_param = Expression::var(y);
          cands.push_back(idx);
        }
      }
    }
    // DomainMap over the observed domain
    if (v.is_colormap()) {
      PatternInstance dm;
      dm.id.name = PatternName::DomainMap;
      for (std::uint8_t c = 0; c < kNumColors; ++c)
        if (v.as_colormap().has(c)) dm.id.color_set.push_back(c);
      if (!dm.id.color_set.empty()) cands.push_back(dm);
    }
  }
  for (const PatternInstance& p : cands) {
    ModelPtr cand = fresh_pattern_model(m.var, p, ctx.next_var);
    auto lp = first_parse_dl(V, cand, *ctx.env, v);
    if (!lp) continue;
    out.push_back({cand, L - l + ctx.alpha * *lp});
  }

  // 4. pure-decomposition wrappings exposing expression-definable parts
  if (ctx.params && ctx.params->s_decomp > 0) {
    std::vector<std::pair<ModelPtr, bool>> wraps;
    wrap_candidates(v, V, ctx, m.var, ctx.params->s_decomp, wraps);
    for (auto& [wm, has_expr] : wraps) {
      if (!has_expr) continue;  // plain P(?,...,?) is already proposed above
      auto lp = first_parse_dl(V, wm, *ctx.env, v);
      if (!lp) continue;
      out.push_back({wm, L - l + ctx.alpha * *lp});
    }
  }
  return out;
}

namespace {

struct NodeRef {
  VarId var;
  bool output_side;
  const ModelNode* node;
};

void collect_nodes(const ModelNode& m, bool output_side, std::vector<NodeRef>& out) {
  if (m.kind != ModelNode::Kind::Expr) out.push_back({m.var, output_side, &m});
  if (m.kind == ModelNode::Kind::Pattern)
    for (const auto& p : m.parts) collect_nodes(*p, output_side, out);
}

// Local distribution at x, replaying part distributions along the
// description's concrete part values.
std::optional<Distribution> local_dist(const ModelNode& m, const DescNode& d,
                                       const Distribution& V, VarId x) {
  if (m.var == x) return V;
  if (m.kind != ModelNode::Kind::Pattern || !d.composite) return std::nullopt;
  std::vector<Value> prior;
  for (size_t i = 0; i < m.parts.size() && i < d.parts.size(); ++i) {
    Distribution Vi = part_distribution(m.pat, static_cast<int>(i), V, prior);
    if (auto r = local_dist(*m.parts[i], *d.parts[i], Vi, x)) return r;
    prior.push_back(d.parts[i]->value);
  }
  return std::nullopt;
}

}  // namespace

std::vector<Transition> transitions(const TaskModel& M,
                                    const std::vector<std::vector<ExampleDescription>>& descs,
                                    const TransitionParams& p, double alpha) {
  size_t n_examples = descs.size();
  for (const auto& ds : descs)
    if (ds.empty()) return {};  // inconsistent model

  // Expression DAG over the top description's environment of each example.
  std::vector<Environment> envs;
  for (const auto& ds : descs) envs.push_back(env_of(*ds[0].input));
  std::vector<VarId> in_vars = vars_of(*M.input);
  ExprDAG dag = ExprDAG::build(envs, in_vars, p.s_expr, p.n_expr);

  // Evaluate every DAG expression under every description's environment.
  std::map<std::pair<size_t, size_t>, std::vector<Value>> expr_values;
  std::map<std::pair<size_t, size_t>, Environment> env_ij;
  for (size_t i = 0; i < n_examples; ++i)
    for (size_t j = 0; j < descs[i].size(); ++j) {
      Environment e = env_of(*descs[i][j].input);
      std::vector<Value> vals;
      vals.reserve(dag.nodes().size());
      for (const auto& n : dag.nodes()) {
        auto r = eval(*n.expr, e);
        vals.push_back(r ? *r : Value(std::int64_t{-1}));  // misses never match grids
      }
      expr_values[{i, j}] = std::move(vals);
      env_ij[{i, j}] = std::move(e);
    }

  std::map<VarId, DistClass> in_classes;
  var_classes(*M.input, input_root_dist().klass(), in_classes);
  std::vector<std::pair<VarId, DistClass>> input_vars(in_classes.begin(), in_classes.end());

  // Model DL of the current task model (shared baseline for estimates).
  double base_model_dl = model_dl(*M.input, input_root_dist(), {}) +
                         model_dl(*M.output, output_root_dist(), input_vars);

  std::vector<NodeRef> nodes;
  collect_nodes(*M.input, false, nodes);
  collect_nodes(*M.output, true, nodes);

  int next_var = M.next_var;
  Environment empty_env;
  std::vector<Transition> out;

  for (const NodeRef& ref : nodes) {
    // Aggregate: union-min within an example, intersection-sum across.
    std::map<std::string, std::pair<ModelPtr, double>> agg;
    bool first_example = true;
    for (size_t i = 0; i < n_examples && (first_example || !agg.empty()); ++i) {
      std::map<std::string, std::pair<ModelPtr, double>> per_example;
      for (size_t j = 0; j < descs[i].size(); ++j) {
        const ExampleDescription& D = descs[i][j];
        const DescPtr& side_desc = ref.output_side ? D.output : D.input;
        const ModelPtr& side_model = ref.output_side ? M.output : M.input;
        const Distribution& root = ref.output_side ? output_root_dist() : input_root_dist();
        DescPtr dx = factor(side_desc, ref.var);
        if (!dx) continue;
        auto V = local_dist(*side_model, *side_desc, root, ref.var);
        if (!V) continue;
        double L_ij = base_model_dl + alpha * D.dl;
        SubmodelContext ctx;
        ctx.dag = &dag;
        auto itv = expr_values.find({i, j});
        ctx.expr_values = ref.output_side && itv != expr_values.end() ? &itv->second : nullptr;
        ctx.env = ref.output_side ? &env_ij[{i, j}] : &empty_env;
        ctx.params = &p;
        ctx.next_var = &next_var;
        ctx.output_side = ref.output_side;
        ctx.input_vars = &input_vars;
        ctx.alpha = alpha;
        ModelPtr mx = factor(side_model, ref.var);
        for (auto& [cand, est] : submodels(*mx, *V, *dx, L_ij, ctx)) {
          std::string key = canonical_key(*cand);
          auto it = per_example.find(key);
          if (it == per_example.end())
            per_example.emplace(key, std::make_pair(cand, est));
          else if (est < it->second.second)
            it->second.second = est;
        }
      }
      if (first_example) {
        agg = std::move(per_example);
        first_example = false;
      } else {
        std::map<std::string, std::pair<ModelPtr, double>> merged;
        for (auto& [key, cand] : agg) {
          auto it = per_example.find(key);
          if (it != per_example.end())
            merged.emplace(key, std::make_pair(cand.first, cand.second + it->second.second));
        }
        agg = std::move(merged);
      }
    }

    // Estimated-DL adjustment for the model change, then target models.
    for (auto& [key, cand] : agg) {
      const auto& [sub, est] = cand;
      // Skip the identity refinement (replacing an unknown by an unknown).
      if (sub->kind == ModelNode::Kind::Unknown) continue;
      if (ref.node->kind == ModelNode::Kind::Pattern &&
          canonical_key(*ref.node) == key)
        continue;
      Distribution Vapprox = ref.output_side ? output_root_dist() : input_root_dist();
      auto V0 = local_dist(ref.output_side ? *M.output : *M.input,
                           ref.output_side ? *descs[0][0].output : *descs[0][0].input,
                           Vapprox, ref.var);
      const Distribution& Vx = V0 ? *V0 : Vapprox;
      const auto& avail = ref.output_side
                              ? input_vars
                              : std::vector<std::pair<VarId, DistClass>>{};
      double adj;
      try {
        adj = est - model_dl(*factor(ref.output_side ? M.output : M.input, ref.var), Vx,
                             ref.output_side ? input_vars : avail) +
              model_dl(*sub, Vx, ref.output_side ? input_vars : avail);
      } catch (const std::exception&) {
        continue;
      }
      Transition t;
      t.source = M;
      t.var = ref.var;
      t.submodel = sub;
      try {
        t.target = substitute(M, ref.var, sub);
      } catch (const std::exception&) {
        continue;  // dangling output references etc.
      }
      t.target.next_var = next_var;
      t.estimated_dl = adj;
      out.push_back(std::move(t));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Transition& a, const Transition& b) {
                     return a.estimated_dl < b.estimated_dl;
                   });
  return out;
}

}  // namespace madil
