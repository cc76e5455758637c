#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "madil/taskio.hpp"

using namespace madil;

namespace {

void add_search_flags(CLI::App* cmd, SearchParams& p, bool* greedy) {
  cmd->add_option("--np", p.parse.n_parse, "max sampled parses (N_p)");
  cmd->add_option("--kp", p.parse.k_parse, "kept parses (K_p)");
  cmd->add_option("--ng", p.parse.n_gen, "max sampled generations (N_g)");
  cmd->add_option("--kg", p.parse.k_gen, "kept generations (K_g)");
  cmd->add_option("--se", p.trans.s_expr, "max expression size (S_e)");
  cmd->add_option("--ne", p.trans.n_expr, "max expression candidates (N_e)");
  cmd->add_option("--kt", p.trans.k_trans, "max evaluated transitions (K_t)");
  cmd->add_option("--sd", p.trans.s_decomp, "max decomposition wrappings (S_d)");
  cmd->add_option("--kc", p.k_children, "search tree branching (K_c)");
  cmd->add_option("-k,--attempts", p.k_attempts, "allowed prediction attempts (K)");
  cmd->add_option("--alpha", p.alpha, "rehearsal factor");
  cmd->add_option("--budget", p.budget_seconds, "time budget per task, seconds");
  cmd->add_flag("--no-testcheck", [&p](size_t) { p.testcheck = false; },
                "disable the test-input parse check");
  cmd->add_flag("--no-pruning", [&p](size_t) { p.pruning = false; },
                "disable the generalization pruning phase");
  cmd->add_flag("--greedy", *greedy, "plain greedy search instead of MCTS");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int cmd_solve(const std::string& task_path, SearchParams p, const std::string& out_path) {
  Task task = load_task_file(task_path);
  TaskOutcome out = run_task(task, p);
  std::cout << "task " << task.id << (out.solved ? " solved" : " not solved")
            << "  score " << out.score << "  " << out.seconds << "s\n";
  std::cout << "model:\n" << out.model_text << "\n";
  for (size_t i = 0; i < out.predictions.attempts.size(); ++i) {
    std::cout << "test[" << i << "] predictions:\n";
    for (const Grid& g : out.predictions.attempts[i])
      std::cout << "  " << grid_to_json(g) << "\n";
  }
  if (!out_path.empty()) write_file(out_path, predictions_to_json({out}));
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  std::vector<Task> tasks = load_tasks(cfg.tasks_path);
  std::vector<TaskOutcome> outcomes(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex io;
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      outcomes[i] = run_task(tasks[i], cfg.search);
      std::lock_guard<std::mutex> lock(io);
      std::cout << tasks[i].id << (outcomes[i].solved ? " solved " : " ------ ")
                << outcomes[i].score << "  " << outcomes[i].seconds << "s\n";
    }
  };
  int jobs = std::max(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  double total = 0;
  int solved = 0;
  for (const auto& o : outcomes) {
    total += o.score;
    solved += o.solved;
  }
  std::cout << "solved " << solved << "/" << tasks.size() << ", micro-accuracy "
            << (tasks.empty() ? 0.0 : total / tasks.size()) << "\n";

  if (!cfg.predictions_path.empty()) write_file(cfg.predictions_path, predictions_to_json(outcomes));
  if (!cfg.summary_path.empty()) write_file(cfg.summary_path, summary_to_csv(outcomes));
  if (!cfg.log_path.empty()) {
    std::ostringstream all;
    std::vector<const TaskOutcome*> sorted;
    for (const auto& o : outcomes) sorted.push_back(&o);
    std::sort(sorted.begin(), sorted.end(),
              [](const TaskOutcome* a, const TaskOutcome* b) { return a->id < b->id; });
    for (const TaskOutcome* o : sorted) all << log_to_jsonl(*o);
    write_file(cfg.log_path, all.str());
  }
  return 0;
}

int cmd_describe(const std::string& task_path, const std::string& model_path,
                 const ParseParams& pp) {
  Task task = load_task_file(task_path);
  std::ifstream in(model_path);
  if (!in) throw std::runtime_error("cannot open " + model_path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  TaskModel M = parse_task_model(text);
  auto names = task_model_names(M);
  for (size_t e = 0; e < task.train.size(); ++e) {
    auto ds = describe(M, Value(task.train[e].first), Value(task.train[e].second), pp);
    std::cout << "example " << e << ": " << ds.size() << " descriptions\n";
    for (const auto& d : ds) {
      std::cout << "  dl=" << d.dl << "\n";
      std::cout << "    in:  " << to_string(*d.input, names) << "\n";
      std::cout << "    out: " << to_string(*d.output, names) << "\n";
    }
  }
  return 0;
}

Grid grid_from_plain_json(const nlohmann::json& rows, const std::string& id) {
  std::istringstream gs(
      nlohmann::json{{"train", {{{"input", rows}, {"output", rows}}}}}.dump());
  Task tmp = load_task(gs, id);
  return tmp.train[0].first;
}

int cmd_score(const std::string& pred_path, const std::string& tasks_path, int attempts) {
  std::vector<Task> tasks = load_tasks(tasks_path);
  std::ifstream in(pred_path);
  if (!in) throw std::runtime_error("cannot open " + pred_path);
  nlohmann::json doc;
  in >> doc;
  std::vector<TaskPredictions> preds;
  for (auto& [id, per_instance] : doc.items()) {
    TaskPredictions tp;
    tp.id = id;
    for (auto& attempts_json : per_instance) {
      std::vector<Grid> attempt_list;
      for (auto& grid_json : attempts_json)
        attempt_list.push_back(grid_from_plain_json(grid_json, id));
      tp.attempts.push_back(std::move(attempt_list));
    }
    preds.push_back(std::move(tp));
  }
  for (const Task& t : tasks)
    for (const auto& p : preds)
      if (p.id == t.id) std::cout << t.id << " " << score_task(p, t, attempts) << "\n";
  std::cout << "micro-accuracy " << score_set(preds, tasks, attempts) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"madil: grid-to-grid program synthesis by MDL-guided search"};
  app.require_subcommand(1);

  SearchParams params;
  bool greedy = false;
  std::string task_path, out_path;

  auto* solve = app.add_subcommand("solve", "learn a model for one task and predict");
  solve->add_option("task", task_path, "ARC task JSON file")->required();
  solve->add_option("--out", out_path, "write predictions JSON here");
  add_search_flags(solve, params, &greedy);

  RunConfig cfg;
  auto* run = app.add_subcommand("run", "solve every task under a path");
  run->add_option("tasks", cfg.tasks_path, "task file or directory")->required();
  run->add_option("--out", cfg.predictions_path, "predictions JSON document");
  run->add_option("--summary", cfg.summary_path, "CSV summary");
  run->add_option("--log", cfg.log_path, "line-delimited JSON learning logs");
  run->add_option("--jobs", cfg.jobs, "worker threads");
  bool run_greedy = false;
  add_search_flags(run, cfg.search, &run_greedy);

  std::string model_path;
  auto* describe_cmd = app.add_subcommand("describe", "dump best descriptions under a model");
  describe_cmd->add_option("task", task_path, "ARC task JSON file")->required();
  describe_cmd->add_option("--model", model_path, "task model text file")->required();
  SearchParams dparams;
  bool dgreedy = false;
  add_search_flags(describe_cmd, dparams, &dgreedy);

  std::string pred_path, tasks_path;
  int attempts = 3;
  auto* score = app.add_subcommand("score", "score a predictions document offline");
  score->add_option("--predictions", pred_path, "predictions JSON")->required();
  score->add_option("--tasks", tasks_path, "task file or directory with expected outputs")
      ->required();
  score->add_option("-k,--attempts", attempts, "attempt window");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      params.use_mcts = !greedy;
      return cmd_solve(task_path, params, out_path);
    }
    if (run->parsed()) {
      cfg.search.use_mcts = !run_greedy;
      return cmd_run(cfg);
    }
    if (describe_cmd->parsed()) return cmd_describe(task_path, model_path, dparams.parse);
    if (score->parsed()) return cmd_score(pred_path, tasks_path, attempts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
