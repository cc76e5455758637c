#include "madil/search.hpp"

#include <algorithm>
#include <cmath>

namespace madil {

namespace {

using Clock = std::chrono::steady_clock;

struct Baselines {
  double input = 0, output = 0;  // L(m0, E of that side)
};

Baselines baselines(const TrainingSet& t, const SearchParams& p) {
  Baselines b;
  TaskModel M0 = TaskModel::initial();
  b.input = model_dl(*M0.input, input_root_dist(), {});
  b.output = model_dl(*M0.output, output_root_dist(), {});
  for (const auto& [vi, vo] : t.examples) {
    b.input += p.alpha * value_dl(vi, input_root_dist());
    b.output += p.alpha * value_dl(vo, output_root_dist());
  }
  return b;
}

std::vector<std::pair<VarId, DistClass>> input_var_classes(const TaskModel& M) {
  std::map<VarId, DistClass> cls;
  var_classes(*M.input, input_root_dist().klass(), cls);
  return {cls.begin(), cls.end()};
}

}  // namespace

std::optional<double> task_dl(const TaskModel& M, const TrainingSet& t,
                              const SearchParams& p, double* input_side,
                              double* output_side) {
  double in_bits = model_dl(*M.input, input_root_dist(), {});
  double out_bits = model_dl(*M.output, output_root_dist(), input_var_classes(M));
  for (const auto& [vi, vo] : t.examples) {
    auto ds = describe(M, vi, vo, p.parse);
    if (ds.empty()) return std::nullopt;
    // the most compressive description, split per side
    Environment env;
    double din = description_dl(*ds[0].input, input_root_dist(), *M.input, env);
    Environment sigma = env_of(*ds[0].input);
    double dout = description_dl(*ds[0].output, output_root_dist(), *M.output, sigma);
    in_bits += p.alpha * din;
    out_bits += p.alpha * dout;
  }
  if (input_side) *input_side = in_bits;
  if (output_side) *output_side = out_bits;
  return in_bits + out_bits;
}

std::optional<double> normalized_dl(const TaskModel& M, const TrainingSet& t,
                                    const SearchParams& p) {
  double in = 0, out = 0;
  if (!task_dl(M, t, p, &in, &out)) return std::nullopt;
  Baselines b = baselines(t, p);
  return in / b.input + out / b.output;
}

bool solves_training(const TaskModel& M, const TrainingSet& t, const SearchParams& p) {
  for (const auto& [vi, vo] : t.examples) {
    auto preds = predict(M, vi, p.parse);
    bool hit = false;
    for (size_t k = 0; k < preds.size() && k < static_cast<size_t>(p.k_attempts); ++k)
      if (compare(preds[k].first, vo) == 0) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

bool check_test_inputs(const TaskModel& M, const TrainingSet& t, const SearchParams& p) {
  Environment empty;
  for (const Value& vi : t.test_inputs) {
    auto s = parse(input_root_dist(), M.input, empty, vi);
    if (!s.next()) return false;
  }
  return true;
}

namespace {

struct GreedyOutcome {
  TaskModel model;
  double exact_dl = 0;
  int depth = 0;
  bool solved = false;
  bool out_of_time = false;
};

// One greedy descent from a starting model.
GreedyOutcome greedy_descent(TaskModel M, double M_dl, const TrainingSet& t,
                             const SearchParams& p, Clock::time_point deadline,
                             int rollout_index, LearnLog* log) {
  GreedyOutcome res;
  res.model = M;
  res.exact_dl = M_dl;
  Baselines base = baselines(t, p);
  for (;;) {
    if (log) ++log->models_visited;
    if (solves_training(res.model, t, p)) {
      res.solved = true;
      return res;
    }
    if (Clock::now() > deadline) {
      res.out_of_time = true;
      return res;
    }
    std::vector<std::vector<ExampleDescription>> descs;
    bool consistent = true;
    for (const auto& [vi, vo] : t.examples) {
      descs.push_back(describe(res.model, vi, vo, p.parse));
      if (descs.back().empty()) consistent = false;
    }
    if (!consistent) return res;

    auto delta = transitions(res.model, descs, p.trans, p.alpha);
    if (static_cast<int>(delta.size()) > p.trans.k_trans)
      delta.resize(static_cast<size_t>(p.trans.k_trans));

    const Transition* best = nullptr;
    double best_dl = res.exact_dl;
    for (const Transition& tr : delta) {
      if (Clock::now() > deadline) {
        res.out_of_time = true;
        break;
      }
      auto dl = task_dl(tr.target, t, p);
      if (!dl) continue;
      if (p.testcheck && !check_test_inputs(tr.target, t, p)) continue;
      if (*dl < best_dl) {
        best_dl = *dl;
        best = &tr;
      }
    }
    if (!best) return res;

    res.model = best->target;
    res.exact_dl = best_dl;
    res.depth += 1;
    if (log) {
      double in = 0, out = 0;
      task_dl(res.model, t, p, &in, &out);
      LearnLog::Step step;
      step.rollout = rollout_index;
      step.depth = res.depth;
      auto names = task_model_names(best->source);
      auto it = names.find(best->var);
      step.var = it != names.end() ? it->second : "x" + std::to_string(best->var);
      step.submodel = canonical_key(*best->submodel);
      step.exact_dl = best_dl;
      step.norm_dl = in / base.input + out / base.output;
      log->steps.push_back(std::move(step));
    }
  }
}

double state_value(double norm_dl) { return 1.0 - 0.5 * norm_dl; }

}  // namespace

TaskModel greedy_search(const TrainingSet& t, const SearchParams& p, LearnLog* log) {
  auto start = Clock::now();
  auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(p.budget_seconds));
  TaskModel M0 = TaskModel::initial();
  double dl0 = *task_dl(M0, t, p);
  auto out = greedy_descent(M0, dl0, t, p, deadline, 1, log);
  if (log) {
    log->rollouts = 1;
    log->rollout_final_dls.push_back(out.exact_dl);
    log->best_rollout = 1;
    log->best_rank = 1;
    log->best_depth = out.depth;
    log->solved = out.solved;
    log->budget_exhausted = out.out_of_time;
    log->seconds_search = std::chrono::duration<double>(Clock::now() - start).count();
  }
  return out.model;
}

TaskModel mcts_search(const TrainingSet& t, const SearchParams& p, LearnLog* log) {
  auto start = Clock::now();
  auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(p.budget_seconds));
  Baselines base = baselines(t, p);

  struct Node {
    TaskModel model;
    double exact_dl = 0;
    double norm_dl = 0;
    int visits = 0;
    double value_sum = 0;
    bool expanded = false;
    std::vector<size_t> children;
    int parent = -1;
    int depth = 0;
  };
  std::vector<Node> tree;
  TaskModel M0 = TaskModel::initial();
  double in0 = 0, out0 = 0;
  double dl0 = *task_dl(M0, t, p, &in0, &out0);
  tree.push_back({M0, dl0, in0 / base.input + out0 / base.output, 0, 0, false, {}, -1, 0});

  // Best-so-far: solutions first, then lowest exact DL.
  TaskModel best_model = M0;
  double best_dl = dl0;
  bool best_solved = false;
  int best_rollout = 0, best_depth = 0, best_rank = 0;
  int rollout_count = 0;

  auto consider = [&](const TaskModel& M, double exact, bool solved, int rollout, int depth,
                      int rank) {
    bool better = solved != best_solved ? solved : exact < best_dl;
    if (better) {
      best_model = M;
      best_dl = exact;
      best_solved = solved;
      best_rollout = rollout;
      best_depth = depth;
      best_rank = rank;
    }
  };

  bool stop = false;
  while (!stop && Clock::now() < deadline &&
         (p.max_rollouts <= 0 || rollout_count < p.max_rollouts)) {
    // Selection: descend by UCB1; unvisited children first, in DL order.
    size_t cur = 0;
    std::vector<size_t> path{0};
    while (tree[cur].expanded && !tree[cur].children.empty()) {
      size_t pick = tree[cur].children[0];
      bool found_unvisited = false;
      for (size_t c : tree[cur].children)
        if (tree[c].visits == 0) {
          pick = c;
          found_unvisited = true;
          break;
        }
      if (!found_unvisited) {
        double best_score = -1;
        for (size_t c : tree[cur].children) {
          double mean = tree[c].value_sum / tree[c].visits;
          double ucb = mean + std::sqrt(2.0) *
                                  std::sqrt(std::log(static_cast<double>(tree[cur].visits)) /
                                            tree[c].visits);
          if (ucb > best_score + 1e-12 ||
              (std::abs(ucb - best_score) <= 1e-12 &&
               tree[c].norm_dl < tree[pick].norm_dl)) {
            best_score = ucb;
            pick = c;
          }
        }
      }
      cur = pick;
      path.push_back(cur);
    }

    // Expansion: top K_c transitions by normalized DL of the evaluated set.
    if (!tree[cur].expanded) {
      tree[cur].expanded = true;
      std::vector<std::vector<ExampleDescription>> descs;
      bool consistent = true;
      for (const auto& [vi, vo] : t.examples) {
        descs.push_back(describe(tree[cur].model, vi, vo, p.parse));
        if (descs.back().empty()) consistent = false;
      }
      if (consistent) {
        auto delta = transitions(tree[cur].model, descs, p.trans, p.alpha);
        if (static_cast<int>(delta.size()) > p.trans.k_trans)
          delta.resize(static_cast<size_t>(p.trans.k_trans));
        std::vector<std::tuple<double, double, TaskModel>> scored;  // (norm, exact, model)
        for (const Transition& tr : delta) {
          if (Clock::now() > deadline) break;
          double in = 0, out = 0;
          auto dl = task_dl(tr.target, t, p, &in, &out);
          if (!dl) continue;
          if (p.testcheck && !check_test_inputs(tr.target, t, p)) continue;
          double norm = in / base.input + out / base.output;
          scored.push_back({norm, *dl, tr.target});
        }
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
          return std::get<0>(a) < std::get<0>(b);
        });
        size_t parent = cur;
        for (size_t k = 0; k < scored.size() && k < static_cast<size_t>(p.k_children); ++k) {
          Node child;
          child.model = std::get<2>(scored[k]);
          child.exact_dl = std::get<1>(scored[k]);
          child.norm_dl = std::get<0>(scored[k]);
          child.parent = static_cast<int>(parent);
          child.depth = tree[parent].depth + 1;
          tree.push_back(std::move(child));
          tree[parent].children.push_back(tree.size() - 1);
        }
      }
      if (!tree[cur].children.empty()) {
        cur = tree[cur].children[0];
        path.push_back(cur);
      }
    }

    // Rollout: one deterministic greedy descent, no depth limit.
    ++rollout_count;
    auto outc = greedy_descent(tree[cur].model, tree[cur].exact_dl, t, p, deadline,
                               rollout_count, log);
    if (log) {
      ++log->rollouts;
      log->rollout_final_dls.push_back(outc.exact_dl);
    }
    consider(outc.model, outc.exact_dl, outc.solved, rollout_count,
             tree[cur].depth + outc.depth, rollout_count);

    // Backpropagation: the final task model's state value.
    double in = 0, out = 0;
    double value = 0;
    if (task_dl(outc.model, t, p, &in, &out))
      value = state_value(in / base.input + out / base.output);
    for (size_t n : path) {
      tree[n].visits += 1;
      tree[n].value_sum += value;
    }

    if (outc.solved) stop = true;
    if (outc.out_of_time) break;
    if (path.size() == 1 && tree[0].children.empty()) break;  // root is terminal
  }

  if (log) {
    log->solved = best_solved;
    log->best_rollout = best_rollout;
    log->best_depth = best_depth;
    log->best_rank = best_rank == 0 ? 1 : best_rank;
    log->budget_exhausted = Clock::now() >= deadline;
    log->seconds_search = std::chrono::duration<double>(Clock::now() - start).count();
  }
  return best_model;
}

TaskModel prune_model(const TaskModel& M, const TrainingSet& t, const SearchParams& p) {
  auto accuracy = [&](const TaskModel& m) {
    int hits = 0;
    for (const auto& [vi, vo] : t.examples) {
      auto preds = predict(m, vi, p.parse);
      for (size_t k = 0; k < preds.size() && k < static_cast<size_t>(p.k_attempts); ++k)
        if (compare(preds[k].first, vo) == 0) {
          ++hits;
          break;
        }
    }
    return hits;
  };

  TaskModel cur = M;
  int cur_acc = accuracy(cur);
  bool changed = true;
  while (changed) {
    changed = false;
    for (VarId x : vars_of(*cur.input)) {
      ModelPtr node = factor(cur.input, x);
      if (!node || node->kind == ModelNode::Kind::Unknown) continue;
      TaskModel cand = cur;
      try {
        cand = substitute(cur, x, ModelNode::unknown(x));
      } catch (const std::exception&) {
        continue;  // would orphan output references
      }
      if (p.testcheck && !check_test_inputs(cand, t, p)) continue;
      int acc = accuracy(cand);
      if (acc >= cur_acc) {
        cur = std::move(cand);
        cur_acc = acc;
        changed = true;
      }
    }
  }
  return cur;
}

SearchResult solve_task(const TrainingSet& t, const SearchParams& p) {
  SearchResult res;
  auto t0 = Clock::now();
  res.model = p.use_mcts ? mcts_search(t, p, &res.log) : greedy_search(t, p, &res.log);
  if (p.pruning && res.log.solved) {
    auto t1 = Clock::now();
    res.model = prune_model(res.model, t, p);
    res.log.seconds_prune = std::chrono::duration<double>(Clock::now() - t1).count();
  }
  res.log.seconds_search = std::chrono::duration<double>(Clock::now() - t0).count() -
                           res.log.seconds_prune;
  return res;
}

}  // namespace madil
