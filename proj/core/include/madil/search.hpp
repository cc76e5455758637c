#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "madil/refinement.hpp"

namespace madil {

struct SearchParams {
  int k_attempts = 3;       // K: allowed prediction attempts
  ParseParams parse;        // N_p, K_p, N_g, K_g
  TransitionParams trans;   // S_e, N_e, K_t, S_d
  int k_children = 3;       // K_c: MCTS expansion width
  double alpha = 100;       // rehearsal factor
  bool testcheck = true;
  bool pruning = true;
  bool use_mcts = true;
  double budget_seconds = 180;
  int max_rollouts = 0;  // 0 = unlimited; a deterministic search-effort cap
};

struct TrainingSet {
  std::vector<std::pair<Value, Value>> examples;  // (input, output) grids
  std::vector<Value> test_inputs;
};

// One structured learning log per task; the raw material for search-effort
// reports.
struct LearnLog {
  struct Step {
    int rollout = 0;
    int depth = 0;
    std::string var;
    std::string submodel;
    double exact_dl = 0;
    double norm_dl = 0;
  };
  std::vector<Step> steps;                  // accepted transitions
  std::vector<double> rollout_final_dls;    // exact DL at each rollout end
  int rollouts = 0;
  int models_visited = 0;
  int best_rollout = 0;  // 1-based rollout producing the best model
  int best_depth = 0;
  int best_rank = 0;     // rank of the best model among rollout finals
  bool solved = false;
  bool budget_exhausted = false;
  double seconds_search = 0;
  double seconds_prune = 0;
};

struct SearchResult {
  TaskModel model;
  LearnLog log;
};

// L(M, E) with the rehearsal factor; nullopt when M is inconsistent with
// some example. Per-side components are written when requested.
std::optional<double> task_dl(const TaskModel& M, const TrainingSet& t,
                              const SearchParams& p, double* input_side = nullptr,
                              double* output_side = nullptr);

// Normalized DL in [0, 2]: per-side compression ratios against M_0.
std::optional<double> normalized_dl(const TaskModel& M, const TrainingSet& t,
                                    const SearchParams& p);

// True when every training output appears among the first K predictions.
bool solves_training(const TaskModel& M, const TrainingSet& t, const SearchParams& p);

// True when the input model parses every test input.
bool check_test_inputs(const TaskModel& M, const TrainingSet& t, const SearchParams& p);

// Greedy search (most compressive transition until no improvement).
TaskModel greedy_search(const TrainingSet& t, const SearchParams& p, LearnLog* log = nullptr);

// UCB1 Monte Carlo tree search over task models with greedy rollouts.
TaskModel mcts_search(const TrainingSet& t, const SearchParams& p, LearnLog* log = nullptr);

// Generalization pruning: replaces input-model patterns and constants by
// unknowns while training prediction accuracy does not decrease. The output
// model is never touched.
TaskModel prune_model(const TaskModel& M, const TrainingSet& t, const SearchParams& p);

// Full pipeline: search, then the pruning phase.
SearchResult solve_task(const TrainingSet& t, const SearchParams& p);

}  // namespace madil
