#include "madil/engine.hpp"

#include <algorithm>

namespace madil {

namespace {

bool needs_any_prior(const PatternInstance& p) {
  for (int i = 0; i < arity(p.id); ++i)
    if (part_needs_prior(p.id, i)) return true;
  return false;
}

}  // namespace

Stream<ScoredDescription> parse(const Distribution& V, const ModelPtr& m,
                                const Environment& env, const Value& v) {
  switch (m->kind) {
    case ModelNode::Kind::Unknown: {
      auto bits = V.dl(v);
      if (!bits) return Stream<ScoredDescription>::empty();
      return Stream<ScoredDescription>::single({DescNode::atom(m->var, v), *bits});
    }
    case ModelNode::Kind::Expr: {
      auto r = eval(*m->expr, env);
      if (!r || compare(*r, v) != 0) return Stream<ScoredDescription>::empty();
      return Stream<ScoredDescription>::single({DescNode::atom(m->var, v), 0.0});
    }
    case ModelNode::Kind::Pattern: {
      // For every decomposition, the rank-sorted product of the part parses.
      auto mm = m;
      auto venv = env;
      auto vdist = V;
      auto tuples = decompose(m->pat, env, v);
      auto outer = std::move(tuples).map(
          [mm, venv, vdist](std::vector<Value> parts) -> Stream<ScoredDescription> {
            std::vector<Memo<ScoredDescription>> comps;
            std::vector<Value> prior;
            for (size_t i = 0; i < parts.size(); ++i) {
              Distribution Vi = part_distribution(mm->pat, static_cast<int>(i), vdist, prior);
              comps.emplace_back(parse(Vi, mm->parts[i], venv, parts[i]));
              prior.push_back(parts[i]);
            }
            if (comps.empty()) {
              // 0-ary pattern: one composite with no parts
              auto val = compose(mm->pat, venv, {}, &vdist);
              if (!val)
                return Stream<ScoredDescription>::empty();
              return Stream<ScoredDescription>::single(
                  {DescNode::comp(mm->var, *val, mm->pat, {}), 0.0});
            }
            auto prod = sorted_product_stream<ScoredDescription>(std::move(comps), nullptr);
            auto parts_copy = std::make_shared<std::vector<Value>>(std::move(parts));
            auto vcopy = std::make_shared<Value>();
            return std::move(prod).map(
                [mm, parts_copy](std::pair<std::vector<ScoredDescription>, double> t)
                    -> ScoredDescription {
                  std::vector<DescPtr> subs;
                  double bits = 0;
                  for (auto& sd : t.first) {
                    subs.push_back(sd.desc);
                    bits += sd.dl;
                  }
                  // Recompose lazily is unnecessary: decompose guarantees the
                  // tuple recomposes to the parsed value.
                  return {DescNode::comp(mm->var, Value(), mm->pat, std::move(subs)), bits};
                });
          });
      auto chained = Stream<ScoredDescription>::chain(std::move(outer));
      Value vv = v;
      return std::move(chained).map([vv, mm](ScoredDescription sd) {
        // Fix the composite's value to the parsed whole.
        auto d = DescNode::comp(mm->var, vv, sd.desc->pat, sd.desc->parts);
        return ScoredDescription{d, sd.dl};
      });
    }
  }
  return Stream<ScoredDescription>::empty();
}

namespace {

// Safety valve for nested generation: infinite part streams combined with
// prefixes that can never compose would otherwise scan forever.
constexpr long kGenerateBudget = 200000;

// Nested-loop generation with prior-conditioned part distributions.
Stream<ScoredDescription> generate_parts_nested(const ModelPtr& m, const Distribution& V,
                                                const Environment& env, size_t i,
                                                std::vector<Value> prior,
                                                std::vector<DescPtr> descs, double bits,
                                                std::shared_ptr<long> budget) {
  if (i == m->parts.size()) {
    auto whole = compose(m->pat, env, prior, &V);
    if (!whole) return Stream<ScoredDescription>::empty();
    return Stream<ScoredDescription>::single(
        {DescNode::comp(m->var, *whole, m->pat, std::move(descs)), bits});
  }
  if (!prefix_viable(m->pat, prior, V)) return Stream<ScoredDescription>::empty();
  Distribution Vi = part_distribution(m->pat, static_cast<int>(i), V, prior);
  auto inner = std::make_shared<Stream<ScoredDescription>>(generate(Vi, m->parts[i], env));
  auto mm = m;
  auto venv = env;
  auto vv = V;
  auto outer = Stream<Stream<ScoredDescription>>(
      [inner, mm, venv, vv, i, prior = std::move(prior), descs = std::move(descs), bits,
       budget]() mutable -> std::optional<Stream<ScoredDescription>> {
        if (--(*budget) < 0) return std::nullopt;
        auto sd = inner->next();
        if (!sd) return std::nullopt;
        auto p2 = prior;
        p2.push_back(sd->desc->value);
        auto d2 = descs;
        d2.push_back(sd->desc);
        return generate_parts_nested(mm, vv, venv, i + 1, std::move(p2), std::move(d2),
                                     bits + sd->dl, budget);
      });
  return Stream<ScoredDescription>::chain(std::move(outer));
}

}  // namespace

Stream<ScoredDescription> generate(const Distribution& V, const ModelPtr& m,
                                   const Environment& env) {
  switch (m->kind) {
    case ModelNode::Kind::Unknown: {
      auto vd = std::make_shared<Distribution>(V);
      auto var = m->var;
      return std::move(vd->enumerate()).map([vd, var](Value v) {
        auto bits = vd->dl(v);
        return ScoredDescription{DescNode::atom(var, std::move(v)), bits ? *bits : 0.0};
      });
    }
    case ModelNode::Kind::Expr: {
      auto r = eval(*m->expr, env);
      if (!r) return Stream<ScoredDescription>::empty();
      return Stream<ScoredDescription>::single({DescNode::atom(m->var, std::move(*r)), 0.0});
    }
    case ModelNode::Kind::Pattern: {
      if (m->parts.empty() || needs_any_prior(m->pat))
        return generate_parts_nested(m, V, env, 0, {}, {}, 0.0,
                                     std::make_shared<long>(kGenerateBudget));
      // Independent parts: cost-sorted product in ascending total DL.
      std::vector<Memo<ScoredDescription>> comps;
      for (size_t i = 0; i < m->parts.size(); ++i) {
        Distribution Vi = part_distribution(m->pat, static_cast<int>(i), V, {});
        comps.emplace_back(generate(Vi, m->parts[i], env));
      }
      auto prod = sorted_product_stream<ScoredDescription>(
          std::move(comps), [](const ScoredDescription& sd) { return sd.dl; });
      auto mm = m;
      auto venv = env;
      auto vdist = std::make_shared<Distribution>(V);
      auto mapped = std::move(prod).map(
          [mm, venv, vdist](std::pair<std::vector<ScoredDescription>, double> t)
              -> std::optional<ScoredDescription> {
            std::vector<Value> parts;
            std::vector<DescPtr> descs;
            double bits = 0;
            for (auto& sd : t.first) {
              parts.push_back(sd.desc->value);
              descs.push_back(sd.desc);
              bits += sd.dl;
            }
            auto whole = compose(mm->pat, venv, parts, vdist.get());
            if (!whole) return std::nullopt;  // composition may be undefined
            return ScoredDescription{DescNode::comp(mm->var, *whole, mm->pat, std::move(descs)),
                                     bits};
          });
      auto src = std::make_shared<Stream<std::optional<ScoredDescription>>>(std::move(mapped));
      auto budget = std::make_shared<long>(kGenerateBudget);
      return Stream<ScoredDescription>([src, budget]() -> std::optional<ScoredDescription> {
        while (auto x = src->next()) {
          if (*x) return **x;
          if (--(*budget) < 0) return std::nullopt;
        }
        return std::nullopt;
      });
    }
  }
  return Stream<ScoredDescription>::empty();
}

std::vector<ScoredDescription> top_k(Stream<ScoredDescription> s, int n, int k) {
  auto xs = s.take(static_cast<size_t>(n));
  std::stable_sort(xs.begin(), xs.end(),
                   [](const ScoredDescription& a, const ScoredDescription& b) {
                     return a.dl < b.dl;
                   });
  if (static_cast<int>(xs.size()) > k) xs.resize(static_cast<size_t>(k));
  return xs;
}

std::vector<ExampleDescription> describe(const TaskModel& M, const Value& v_in,
                                         const Value& v_out, const ParseParams& p) {
  std::vector<ExampleDescription> out;
  Environment empty;
  auto ins = top_k(parse(input_root_dist(), M.input, empty, v_in), p.n_parse, p.k_parse);
  for (const auto& di : ins) {
    Environment sigma = env_of(*di.desc);
    auto outs = top_k(parse(output_root_dist(), M.output, sigma, v_out), p.n_parse, p.k_parse);
    for (const auto& dd : outs)
      out.push_back({di.desc, dd.desc, di.dl + dd.dl});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ExampleDescription& a, const ExampleDescription& b) {
                     return a.dl < b.dl;
                   });
  return out;
}

std::vector<std::pair<Value, double>> predict(const TaskModel& M, const Value& v_in,
                                              const ParseParams& p) {
  Environment empty;
  std::map<Value, double, ValueLess> best;
  auto ins = top_k(parse(input_root_dist(), M.input, empty, v_in), p.n_parse, p.k_parse);
  for (const auto& di : ins) {
    Environment sigma = env_of(*di.desc);
    auto gens = top_k(generate(output_root_dist(), M.output, sigma), p.n_gen, p.k_gen);
    for (const auto& dg : gens) {
      double dl = di.dl + dg.dl;
      auto [it, inserted] = best.try_emplace(dg.desc->value, dl);
      if (!inserted && dl < it->second) it->second = dl;
    }
  }
  std::vector<std::pair<Value, double>> out(best.begin(), best.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return compare(a.first, b.first) < 0;
  });
  return out;
}

}  // namespace madil
