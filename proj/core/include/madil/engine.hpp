#pragma once

#include <utility>
#include <vector>

#include "madil/model.hpp"
#include "madil/stream.hpp"

namespace madil {

struct ParseParams {
  int n_parse = 100;  // N_p: max sampled parses
  int k_parse = 3;    // K_p: kept parses
  int n_gen = 3;      // N_g: max sampled generations
  int k_gen = 3;      // K_g: kept generations
};

struct ScoredDescription {
  DescPtr desc;
  double dl = 0;
};

// Lazy sequence of the descriptions d in m[env] with value(d) = v, paired
// with L(d | V, m[env]).
Stream<ScoredDescription> parse(const Distribution& V, const ModelPtr& m,
                                const Environment& env, const Value& v);

// Lazy sequence of all descriptions d in m[env]; values drawn from the
// distributions in ascending dl, expressions evaluated, parts composed.
Stream<ScoredDescription> generate(const Distribution& V, const ModelPtr& m,
                                   const Environment& env);

// Example descriptions for a pair of values, ascending total DL; at most
// k_parse^2 entries. Empty result signals inconsistency.
std::vector<ExampleDescription> describe(const TaskModel& M, const Value& v_in,
                                         const Value& v_out, const ParseParams& p);

// Predicted outputs for an input, ascending DL, duplicate values removed
// (keeping the minimal DL). Empty result = prediction failure.
std::vector<std::pair<Value, double>> predict(const TaskModel& M, const Value& v_in,
                                              const ParseParams& p);

// take(n) + stable sort by dl + truncate to k.
std::vector<ScoredDescription> top_k(Stream<ScoredDescription> s, int n, int k);

}  // namespace madil
