// bstar: generate tasks, solve them with B* or the sampling baseline, and run
// benchmark sweeps.
//
// Exit codes: 0 success, 1 no solution found, 2 invalid input or file error.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "bstar/artifact_io.hpp"
#include "bstar/baseline.hpp"
#include "bstar/bench.hpp"
#include "bstar/benchgen.hpp"
#include "bstar/placement.hpp"
#include "bstar/robot_io.hpp"

namespace {

using namespace bstar;

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitInvalid = 2;

struct CliConfig {
  std::vector<std::string> robots;
  std::string task;
  std::vector<int> levels;
  std::uint64_t seed = 0;
  std::vector<int> gammas;
  int retries = 10;
  double mu0 = 0.01;
  double kappa = 5.0;
  int workers = 1;
  std::string out;
  int verbosity = 0;
  std::string csv;  // report input
};

void emit(const std::string& path, const Json& j) {
  if (path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json_file(path, j);
}

SolveOptions solve_options(const CliConfig& c) {
  SolveOptions opt;
  opt.max_retries = c.retries;
  opt.schedule.mu0 = c.mu0;
  opt.schedule.kappa = c.kappa;
  opt.rng_seed = c.seed;
  opt.validate();
  return opt;
}

const std::string& single_robot(const CliConfig& c) {
  if (c.robots.size() != 1) throw InvalidInput("exactly one --robot is required");
  return c.robots.front();
}

int cmd_gen(const CliConfig& c) {
  const RobotModel robot = resolve_robot(single_robot(c));
  GenParams p;
  if (c.levels.size() > 1) throw InvalidInput("gen takes a single --level");
  p.level = c.levels.empty() ? 3 : c.levels.front();
  std::mt19937_64 rng(c.seed);
  emit(c.out, task_to_json(gen_random_task(robot, p, rng)));
  return kExitOk;
}

TaskPath load_task(const CliConfig& c) {
  if (c.task.empty()) throw InvalidInput("--task is required");
  return task_from_json(read_json_file(c.task, "task"));
}

int cmd_solve(const CliConfig& c) {
  const RobotModel robot = resolve_robot(single_robot(c));
  const TaskPath task = load_task(c);
  SolveOptions opt = solve_options(c);
  if (c.verbosity > 0)
    opt.on_inner = [](int attempt, int j, double mu, const InnerResult& r) {
      std::cerr << Json{{"attempt", attempt},     {"outer", j},
                        {"mu", mu},               {"merit", r.merit},
                        {"iterations", r.iterations}, {"converged", r.converged},
                        {"max_eq_violation", r.max_eq_violation}}
                       .dump()
                << "\n";
    };
  const Solution s = solve(task, robot, opt);
  emit(c.out, solution_to_json(s));
  if (!s.diagnostics.success) {
    std::cerr << "bstar: no solution: " << s.diagnostics.failure << "\n";
    return kExitNoSolution;
  }
  return kExitOk;
}

int cmd_baseline(const CliConfig& c) {
  const RobotModel robot = resolve_robot(single_robot(c));
  const TaskPath task = load_task(c);
  BaselineOptions opt;
  if (c.gammas.size() > 1) throw InvalidInput("baseline takes a single --gamma");
  opt.gamma = c.gammas.empty() ? 100 : c.gammas.front();
  opt.workers = c.workers;
  opt.solve = solve_options(c);
  std::mt19937_64 rng(c.seed);
  const IKDatabase db = sample_ik_database(task, robot, opt, rng);
  const BaselineResult r = bfs_optimal(db, opt);
  Json out = solution_to_json(r.solution);
  out["status"] = to_string(r.status);
  out["ate"] = r.ate;
  Json bases = Json::array();
  for (const auto& b : r.bases) bases.push_back({b.x, b.y, b.theta});
  out["entry_bases"] = bases;
  emit(c.out, out);
  if (!r.success()) {
    std::cerr << "bstar: baseline found no solution: " << to_string(r.status) << "\n";
    return kExitNoSolution;
  }
  return kExitOk;
}

// The suite comes from --robot/--level/--gamma, or from a JSON file given
// with --task: {"robots": [...], "levels": [...], "tasks_per_level": n,
// "methods": [...], "baseline_time_limit": s}.
int cmd_bench(const CliConfig& c) {
  if (c.out.empty()) throw InvalidInput("--out is required for bench");
  std::vector<std::string> robots = c.robots.empty() ? fixture_ids() : c.robots;
  std::vector<int> levels = c.levels.empty() ? std::vector<int>{1, 2, 3, 4} : c.levels;
  std::vector<std::string> methods = {"bstar"};
  for (int g : c.gammas.empty() ? std::vector<int>{10, 100, 1000} : c.gammas) methods.push_back("b-" + std::to_string(g));
  int tasks_per_level = 25;
  BenchOptions opt;
  if (!c.task.empty()) {
    const Json j = read_json_file(c.task, "suite");
    detail::guarded("suite", [&] {
      robots = j.value("robots", robots);
      levels = j.value("levels", levels);
      tasks_per_level = j.value("tasks_per_level", tasks_per_level);
      methods = j.value("methods", methods);
      opt.baseline_time_limit = j.value("baseline_time_limit", opt.baseline_time_limit);
      return 0;
    });
  }
  for (const auto& r : robots) load_fixture(r);
  for (int l : levels) require(l >= 1 && l <= 20, "levels must lie in [1, 20]");
  opt.workers = c.workers;
  opt.solve = solve_options(c);
  if (c.verbosity > 0)
    opt.on_progress = [](std::size_t done, std::size_t total) {
      std::cerr << "bstar: " << done << "/" << total << " cells\n";
    };
  const auto suite = make_suite(robots, levels, tasks_per_level, c.seed);
  const BenchmarkResult result = run_benchmark(suite, methods, opt);
  const auto rows = result.rows();
  std::ofstream csv(c.out);
  if (!csv) throw InvalidInput("cannot write '" + c.out + "'");
  write_csv(csv, rows);
  write_json_file(std::filesystem::path(c.out).replace_extension(".summary.json").string(), summarize(rows));
  return kExitOk;
}

int cmd_report(const CliConfig& c) {
  std::ifstream in(c.csv);
  if (!in) throw InvalidInput("cannot open CSV file '" + c.csv + "'");
  emit(c.out, summarize(read_csv(in)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-base placement for manipulator paths"};
  app.require_subcommand(1);
  CliConfig c;

  const auto add_robot = [&](CLI::App* s, bool many) {
    auto* o = s->add_option("--robot", c.robots, "fixture id or robot JSON path");
    if (!many) o->expected(1);
  };
  const auto add_solver = [&](CLI::App* s) {
    s->add_option("--retries", c.retries, "maximum initialization retries")->check(CLI::PositiveNumber);
    s->add_option("--mu0", c.mu0, "initial base penalty")->check(CLI::PositiveNumber);
    s->add_option("--kappa", c.kappa, "penalty growth factor")->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("gen", "generate a random task");
  add_robot(gen, false);
  gen->add_option("--level", c.levels, "complexity level; t = 2^level")->expected(1)->check(CLI::PositiveNumber);

  auto* solve_cmd = app.add_subcommand("solve", "solve a task with B*");
  add_robot(solve_cmd, false);
  solve_cmd->add_option("--task", c.task, "task JSON");
  add_solver(solve_cmd);

  auto* base = app.add_subcommand("baseline", "solve a task with the IK database baseline");
  add_robot(base, false);
  base->add_option("--task", c.task, "task JSON");
  base->add_option("--gamma", c.gammas, "IK samples per waypoint")->expected(1)->check(CLI::PositiveNumber);
  base->add_option("--workers", c.workers, "sampling threads")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "run a benchmark sweep");
  add_robot(bench, true);
  bench->add_option("--task", c.task, "suite JSON (optional)");
  bench->add_option("--level", c.levels, "levels")->check(CLI::PositiveNumber);
  bench->add_option("--gamma", c.gammas, "baseline sample counts")->check(CLI::PositiveNumber);
  bench->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  add_solver(bench);

  auto* report = app.add_subcommand("report", "summarize an existing benchmark CSV");
  report->add_option("csv", c.csv, "benchmark CSV")->required();

  for (auto* s : {gen, solve_cmd, base, bench, report}) {
    s->add_option("--out", c.out, "output path (stdout when omitted)");
    s->add_flag("-v,--verbosity", c.verbosity, "more progress output on stderr");
    if (s != report) s->add_option("--seed", c.seed, "master seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*gen) return cmd_gen(c);
    if (*solve_cmd) return cmd_solve(c);
    if (*base) return cmd_baseline(c);
    if (*bench) return cmd_bench(c);
    return cmd_report(c);
  } catch (const std::exception& e) {
    std::cerr << "bstar: " << e.what() << "\n";
    return kExitInvalid;
  }
}
