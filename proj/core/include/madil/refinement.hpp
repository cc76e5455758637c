#pragma once

#include <vector>

#include "madil/engine.hpp"
#include "madil/model.hpp"

namespace madil {

struct TransitionParams {
  int s_expr = 6;     // S_e: max expression size
  int n_expr = 1000;  // N_e: max expression candidates
  int k_trans = 100;  // K_t: max evaluated transitions
  int s_decomp = 1;   // S_d: max decomposition wrappings
};

struct Transition {
  TaskModel source;
  VarId var = 0;
  ModelPtr submodel;
  TaskModel target;
  double estimated_dl = 0;
};

// Candidate submodels for one sub-description: the constant value, matching
// expressions from the DAG, and parseable pattern submodels (optionally
// wrapped in pure-decomposition patterns). Returned with estimated DLs
// relative to the current description DL L.
struct SubmodelContext {
  const ExprDAG* dag = nullptr;
  const std::vector<Value>* expr_values = nullptr;  // per DAG node, this env
  const Environment* env = nullptr;
  const TransitionParams* params = nullptr;
  int* next_var = nullptr;
  bool output_side = false;
  const std::vector<std::pair<VarId, DistClass>>* input_vars = nullptr;
  double alpha = 1.0;
};

std::vector<std::pair<ModelPtr, double>> submodels(const ModelNode& m, const Distribution& V,
                                                   const DescNode& d, double L,
                                                   const SubmodelContext& ctx);

// Consistent transitions from M, ascending estimated DL. descs holds the
// example descriptions produced by describe() for each training example.
std::vector<Transition> transitions(const TaskModel& M,
                                    const std::vector<std::vector<ExampleDescription>>& descs,
                                    const TransitionParams& p, double alpha);

// Canonical structural key for aggregating candidate submodels across
// descriptions (unknowns print anonymously).
std::string canonical_key(const ModelNode& m);

}  // namespace madil
