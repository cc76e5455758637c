#include "madil/taskio.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace madil {

namespace {

using nlohmann::json;

Grid grid_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw TaskLoadError(where + ": grid must be a non-empty array of rows");
  int h = static_cast<int>(j.size());
  if (h > kMaxSide) throw TaskLoadError(where + ": grid height exceeds 30");
  int w = -1;
  Grid g;
  g.kind = GridKind::Full;
  g.h = h;
  for (int i = 0; i < h; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.empty())
      throw TaskLoadError(where + ": row " + std::to_string(i) + " must be a non-empty array");
    if (w < 0) {
      w = static_cast<int>(row.size());
      if (w > kMaxSide) throw TaskLoadError(where + ": grid width exceeds 30");
      g.w = w;
      g.cells.assign(static_cast<size_t>(h) * w, 0);
    } else if (static_cast<int>(row.size()) != w) {
      throw TaskLoadError(where + ": ragged rows");
    }
    for (int jj = 0; jj < w; ++jj) {
      const json& cell = row[jj];
      if (!cell.is_number_integer())
        throw TaskLoadError(where + ": cell (" + std::to_string(i) + "," + std::to_string(jj) +
                            ") is not an integer");
      int c = cell.get<int>();
      if (c < 0 || c > 9)
        throw TaskLoadError(where + ": cell (" + std::to_string(i) + "," + std::to_string(jj) +
                            ") out of color range 0..9");
      g.at(i, jj) = static_cast<std::uint8_t>(c);
    }
  }
  return g;
}

json grid_json(const Grid& g) {
  json rows = json::array();
  for (int i = 0; i < g.h; ++i) {
    json row = json::array();
    for (int j = 0; j < g.w; ++j) row.push_back(static_cast<int>(g.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Task load_task(std::istream& in, const std::string& id) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw TaskLoadError(id + ": malformed JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("train") || !j["train"].is_array() || j["train"].empty())
    throw TaskLoadError(id + ": missing non-empty \"train\" array");
  Task t;
  t.id = id;
  int k = 0;
  for (const json& ex : j["train"]) {
    std::string where = id + ".train[" + std::to_string(k++) + "]";
    if (!ex.contains("input") || !ex.contains("output"))
      throw TaskLoadError(where + ": example needs input and output");
    t.train.push_back({grid_from_json(ex["input"], where + ".input"),
                       grid_from_json(ex["output"], where + ".output")});
  }
  if (j.contains("test")) {
    k = 0;
    for (const json& ex : j["test"]) {
      std::string where = id + ".test[" + std::to_string(k++) + "]";
      if (!ex.contains("input")) throw TaskLoadError(where + ": test instance needs input");
      std::optional<Grid> expected;
      if (ex.contains("output")) expected = grid_from_json(ex["output"], where + ".output");
      t.test.push_back({grid_from_json(ex["input"], where + ".input"), std::move(expected)});
    }
  }
  return t;
}

Task load_task_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TaskLoadError("cannot open " + path);
  std::string id = std::filesystem::path(path).stem().string();
  return load_task(in, id);
}

std::string task_to_json(const Task& t) {
  json j;
  j["train"] = json::array();
  for (const auto& [in, out] : t.train)
    j["train"].push_back({{"input", grid_json(in)}, {"output", grid_json(out)}});
  j["test"] = json::array();
  for (const auto& [in, out] : t.test) {
    json e{{"input", grid_json(in)}};
    if (out) e["output"] = grid_json(*out);
    j["test"].push_back(std::move(e));
  }
  return j.dump();
}

std::string grid_to_json(const Grid& g) { return grid_json(g).dump(); }

TrainingSet to_training_set(const Task& t) {
  TrainingSet s;
  for (const auto& [in, out] : t.train) s.examples.push_back({Value(in), Value(out)});
  for (const auto& [in, out] : t.test) s.test_inputs.push_back(Value(in));
  return s;
}

double score_task(const TaskPredictions& pred, const Task& task, int k_attempts) {
  if (task.test.empty()) return 0;
  double total = 0;
  for (size_t i = 0; i < task.test.size(); ++i) {
    const auto& expected = task.test[i].second;
    if (!expected) continue;
    if (i >= pred.attempts.size()) continue;
    const auto& attempts = pred.attempts[i];
    for (size_t k = 0; k < attempts.size() && k < static_cast<size_t>(k_attempts); ++k)
      if (attempts[k] == *expected) {
        total += 1;
        break;
      }
  }
  return total / static_cast<double>(task.test.size());
}

double score_set(const std::vector<TaskPredictions>& preds, const std::vector<Task>& tasks,
                 int k_attempts) {
  if (tasks.empty()) return 0;
  double total = 0;
  for (const Task& t : tasks) {
    for (const TaskPredictions& p : preds)
      if (p.id == t.id) {
        total += score_task(p, t, k_attempts);
        break;
      }
  }
  return total / static_cast<double>(tasks.size());
}

TaskOutcome run_task(const Task& task, const SearchParams& params) {
  auto t0 = std::chrono::steady_clock::now();
  TaskOutcome out;
  out.id = task.id;
  TrainingSet t = to_training_set(task);
  SearchResult res = solve_task(t, params);
  out.log = res.log;
  out.solved = res.log.solved;
  out.model_size = size(*res.model.input) + size(*res.model.output);
  out.model_text = to_string(res.model);
  out.predictions.id = task.id;
  for (const auto& [in, expected] : task.test) {
    auto preds = predict(res.model, Value(in), params.parse);
    std::vector<Grid> attempts;
    for (size_t k = 0; k < preds.size() && k < static_cast<size_t>(params.k_attempts); ++k)
      if (preds[k].first.is_grid()) attempts.push_back(preds[k].first.as_grid());
    out.predictions.attempts.push_back(std::move(attempts));
  }
  out.score = score_task(out.predictions, task, params.k_attempts);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string predictions_to_json(const std::vector<TaskOutcome>& outcomes) {
  std::vector<const TaskOutcome*> sorted;
  for (const auto& o : outcomes) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(),
            [](const TaskOutcome* a, const TaskOutcome* b) { return a->id < b->id; });
  json doc = json::object();
  for (const TaskOutcome* o : sorted) {
    json per_instance = json::array();
    for (const auto& attempts : o->predictions.attempts) {
      json list = json::array();
      for (const Grid& g : attempts) list.push_back(json::parse(grid_to_json(g)));
      per_instance.push_back(std::move(list));
    }
    doc[o->id] = std::move(per_instance);
  }
  return doc.dump(1);
}

std::string summary_to_csv(const std::vector<TaskOutcome>& outcomes) {
  std::vector<const TaskOutcome*> sorted;
  for (const auto& o : outcomes) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(),
            [](const TaskOutcome* a, const TaskOutcome* b) { return a->id < b->id; });
  std::ostringstream os;
  os << "task,solved,score,seconds,model_size,search_depth,best_rank,rollouts\n";
  for (const TaskOutcome* o : sorted) {
    os << o->id << ',' << (o->solved ? 1 : 0) << ',' << o->score << ',' << o->seconds << ','
       << o->model_size << ',' << o->log.best_depth << ',' << o->log.best_rank << ','
       << o->log.rollouts << '\n';
  }
  return os.str();
}

std::string log_to_jsonl(const TaskOutcome& o) {
  std::ostringstream os;
  json header{{"task", o.id},       {"event", "summary"},
              {"solved", o.solved}, {"score", o.score},
              {"seconds", o.seconds}, {"model_size", o.model_size},
              {"rollouts", o.log.rollouts}, {"best_rollout", o.log.best_rollout},
              {"best_rank", o.log.best_rank}, {"best_depth", o.log.best_depth},
              {"models_visited", o.log.models_visited},
              {"seconds_search", o.log.seconds_search},
              {"seconds_prune", o.log.seconds_prune}};
  os << header.dump() << '\n';
  for (const auto& s : o.log.steps) {
    json step{{"task", o.id},     {"event", "accept"},  {"rollout", s.rollout},
              {"depth", s.depth}, {"var", s.var},       {"submodel", s.submodel},
              {"dl", s.exact_dl}, {"norm_dl", s.norm_dl}};
    os << step.dump() << '\n';
  }
  for (size_t r = 0; r < o.log.rollout_final_dls.size(); ++r) {
    json fin{{"task", o.id},
             {"event", "rollout_end"},
             {"rollout", static_cast<int>(r + 1)},
             {"dl", o.log.rollout_final_dls[r]}};
    os << fin.dump() << '\n';
  }
  return os.str();
}

std::vector<Task> load_tasks(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<Task> tasks;
  if (fs::is_directory(path)) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.path().extension() == ".json") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) tasks.push_back(load_task_file(f));
  } else {
    tasks.push_back(load_task_file(path));
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
  return tasks;
}

}  // namespace madil
