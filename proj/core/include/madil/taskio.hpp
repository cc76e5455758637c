#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "madil/search.hpp"
#include "madil/values.hpp"

namespace madil {

struct Task {
  std::string id;
  std::vector<std::pair<Grid, Grid>> train;
  std::vector<std::pair<Grid, std::optional<Grid>>> test;  // expected may be absent
};

struct TaskLoadError : std::runtime_error {
  explicit TaskLoadError(const std::string& what) : std::runtime_error(what) {}
};

// Parses the ARC JSON format: {"train":[{"input":..,"output":..},..],
// "test":[..]}. Grids are lists of rows of integers 0..9, at most 30x30.
Task load_task(std::istream& in, const std::string& id = "");
Task load_task_file(const std::string& path);
std::string task_to_json(const Task& t);

std::string grid_to_json(const Grid& g);

TrainingSet to_training_set(const Task& t);

// Per-test-instance ordered attempt lists for one task.
struct TaskPredictions {
  std::string id;
  std::vector<std::vector<Grid>> attempts;  // one list per test instance
};

// Micro-accuracy: a test instance scores 1 when the expected grid equals one
// of the first K predictions; a task scores the mean over its instances.
double score_task(const TaskPredictions& pred, const Task& task, int k_attempts);
double score_set(const std::vector<TaskPredictions>& preds, const std::vector<Task>& tasks,
                 int k_attempts);

// Run configuration: all search parameters plus IO paths.
struct RunConfig {
  SearchParams search;
  std::string tasks_path;        // file or directory
  std::string predictions_path;  // JSON document
  std::string summary_path;      // CSV summary
  std::string log_path;          // line-delimited JSON learning logs
  int jobs = 1;
};

struct TaskOutcome {
  std::string id;
  TaskPredictions predictions;
  LearnLog log;
  bool solved = false;
  double score = 0;
  double seconds = 0;
  int model_size = 0;
  std::string model_text;
};

// Solves one task end to end (search + pruning + prediction).
TaskOutcome run_task(const Task& task, const SearchParams& params);

// Deterministic prediction document for a set of outcomes (sorted by id).
std::string predictions_to_json(const std::vector<TaskOutcome>& outcomes);
std::string summary_to_csv(const std::vector<TaskOutcome>& outcomes);
std::string log_to_jsonl(const TaskOutcome& outcome);

// Loads every *.json task under a path (file or directory), sorted by id.
std::vector<Task> load_tasks(const std::string& path);

}  // namespace madil
