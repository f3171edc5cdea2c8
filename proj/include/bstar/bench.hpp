#pragma once

// Benchmark runner: a suite of generated tasks, every (task, method) cell run
// in a worker pool with its own seed, CSV rows plus a JSON summary.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bstar/baseline.hpp"
#include "bstar/benchgen.hpp"
#include "bstar/placement.hpp"
#include "bstar/robot_io.hpp"
#include "bstar/seeding.hpp"

namespace bstar {

struct TaskSpec {
  std::string robot_id;
  int level = 1;
  std::uint64_t seed = 0;

  int t() const { return 1 << level; }
};

struct MetricsReport {
  std::string robot;
  int level = 1;
  std::uint64_t seed = 0;
  std::string method;
  bool success = false;
  std::optional<double> ate;          // success only
  std::optional<double> path_length;  // success only
  double runtime_total_ms = 0.0;
  double runtime_init_ms = 0.0;
  double runtime_inner_ms = 0.0;
  double runtime_outer_ms = 0.0;
  std::optional<int> retries;  // B* only
};

// Methods: "bstar" (minimum path length), "bstar-feasibility", and "b-<gamma>"
// for the sampling baseline.
struct Method {
  enum class Kind { kBStar, kBaseline } kind = Kind::kBStar;
  ObjectiveKind objective = ObjectiveKind::kMinPathLength;
  int gamma = 0;
};

inline Method parse_method(const std::string& id) {
  if (id == "bstar") return {};
  if (id == "bstar-feasibility") return {Method::Kind::kBStar, ObjectiveKind::kFeasibility, 0};
  if (id.rfind("b-", 0) == 0) {
    std::size_t used = 0;
    int g = 0;
    try {
      g = std::stoi(id.substr(2), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == id.size() - 2 && g >= 1) return {Method::Kind::kBaseline, ObjectiveKind::kMinPathLength, g};
  }
  throw InvalidInput("unknown method '" + id + "'");
}

// Stable per-method stream index (FNV-1a of the id).
inline std::uint64_t method_key(const std::string& id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// Task seeds derive from the master seed and the (robot, level, index)
// position, so adding robots or levels does not change existing tasks.
inline std::vector<TaskSpec> make_suite(const std::vector<std::string>& robots, const std::vector<int>& levels,
                                        int tasks_per_level, std::uint64_t master_seed) {
  require(tasks_per_level >= 0, "tasks per level must be non-negative");
  std::vector<TaskSpec> suite;
  for (const auto& r : robots)
    for (int l : levels)
      for (int k = 0; k < tasks_per_level; ++k)
        suite.push_back({r, l, derive_seed(derive_seed(master_seed, method_key(r)), (std::uint64_t(l) << 32) | k)});
  return suite;
}

struct BenchOptions {
  int workers = 1;
  double baseline_time_limit = 60.0;  // s
  bool keep_solutions = false;
  SolveOptions solve;       // rng_seed and objective are set per cell
  GenParams gen;            // level is set per task
  // Called once per finished cell, serialized.
  std::function<void(std::size_t done, std::size_t total)> on_progress;
};

struct BenchCell {
  TaskSpec spec;
  MetricsReport row;
  std::string failure;
  int merit_increases = 0;
  std::optional<TaskPath> task;
  std::optional<Solution> solution;
  std::vector<BaseConfig> baseline_bases;  // entry bases used by a baseline solution
};

struct BenchmarkResult {
  std::vector<BenchCell> cells;  // suite order, then method order

  std::vector<MetricsReport> rows() const {
    std::vector<MetricsReport> out;
    for (const auto& c : cells) out.push_back(c.row);
    return out;
  }
};

namespace detail {

inline double ms_between(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

inline BenchCell run_cell(const TaskSpec& spec, const std::string& method_id, const BenchOptions& opt) {
  using Clock = std::chrono::steady_clock;
  BenchCell cell;
  cell.spec = spec;
  MetricsReport& row = cell.row;
  row.robot = spec.robot_id;
  row.level = spec.level;
  row.seed = spec.seed;
  row.method = method_id;
  // Task generation is not part of the measured runtime.
  auto t_start = Clock::now();
  try {
    const Method m = parse_method(method_id);
    const RobotModel robot = load_fixture(spec.robot_id);
    GenParams gp = opt.gen;
    gp.level = spec.level;
    std::mt19937_64 gen(spec.seed);
    const TaskPath task = gen_random_task(robot, gp, gen);
    const std::uint64_t cell_seed = derive_seed(spec.seed, method_key(method_id));
    t_start = Clock::now();
    if (m.kind == Method::Kind::kBStar) {
      SolveOptions so = opt.solve;
      so.objective_kind = m.objective;
      so.rng_seed = cell_seed;
      Solution s = solve(task, robot, so);
      const Diagnostics& d = s.diagnostics;
      row.success = d.success;
      row.retries = d.retries_used;
      row.runtime_init_ms = d.runtime.initialization;
      row.runtime_inner_ms = d.runtime.inner_total;
      row.runtime_outer_ms = d.runtime.outer_total;
      // The returned base is a single pose, so its ATE is zero by
      // construction; the reported figure is the spread of the relaxed bases
      // just before they were fixed.
      if (d.success) {
        row.ate = d.ate_relaxed;
        row.path_length = d.path_length;
      } else {
        cell.failure = d.failure;
      }
      cell.merit_increases = d.merit_increases;
      if (opt.keep_solutions) cell.solution = std::move(s);
    } else {
      BaselineOptions bo;
      bo.gamma = m.gamma;
      bo.time_limit = opt.baseline_time_limit;
      bo.solve = opt.solve;
      std::mt19937_64 rng(cell_seed);
      const IKDatabase db = sample_ik_database(task, robot, bo, rng);
      const auto t_search = Clock::now();
      BaselineResult r = bfs_optimal(db, bo);
      const auto t_end = Clock::now();
      row.runtime_init_ms = ms_between(t_start, t_search);
      row.runtime_inner_ms = ms_between(t_search, t_end);
      row.runtime_outer_ms = ms_between(t_start, t_end);
      row.success = r.success();
      if (r.success()) {
        row.ate = r.ate;
        row.path_length = r.cost;
      } else {
        cell.failure = to_string(r.status);
      }
      if (opt.keep_solutions && r.success()) {
        cell.solution = std::move(r.solution);
        cell.baseline_bases = std::move(r.bases);
      }
    }
    if (opt.keep_solutions) cell.task = task;
  } catch (const std::exception& e) {
    row.success = false;
    row.ate.reset();
    row.path_length.reset();
    cell.failure = e.what();
  }
  row.runtime_total_ms = ms_between(t_start, Clock::now());
  return cell;
}

}  // namespace detail

// Cells are claimed from a shared counter and stored by index, so the output
// order and every cell's randomness are independent of the worker count.
inline BenchmarkResult run_benchmark(const std::vector<TaskSpec>& suite, const std::vector<std::string>& methods,
                                     const BenchOptions& opt) {
  require(opt.workers >= 1, "workers must be at least 1");
  for (const auto& m : methods) parse_method(m);
  BenchmarkResult out;
  const std::size_t total = suite.size() * methods.size();
  out.cells.resize(total);
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  const auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < total;) {
      out.cells[k] = detail::run_cell(suite[k / methods.size()], methods[k % methods.size()], opt);
      std::lock_guard<std::mutex> lock(mu);
      ++done;
      if (opt.on_progress) opt.on_progress(done, total);
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(opt.workers, std::max<std::size_t>(total, 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

// CSV with a fixed header; optional fields are left empty.

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "robot",           "level",           "seed",           "method",           "success",
      "ate",             "path_length",     "runtime_total_ms", "runtime_init_ms", "runtime_inner_ms",
      "runtime_outer_ms", "retries"};
  return cols;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw InvalidInput(std::string("bad ") + what + " value '" + s + "' in CSV");
  return v;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<MetricsReport>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << "\n";
  const auto opt_str = [](const std::optional<double>& v) { return v ? detail::fmt_double(*v) : std::string(); };
  for (const auto& r : rows) {
    require(r.robot.find(',') == std::string::npos && r.method.find(',') == std::string::npos,
            "robot and method ids must not contain commas");
    os << r.robot << "," << r.level << "," << r.seed << "," << r.method << "," << (r.success ? 1 : 0) << ","
       << opt_str(r.ate) << "," << opt_str(r.path_length) << "," << detail::fmt_double(r.runtime_total_ms) << ","
       << detail::fmt_double(r.runtime_init_ms) << "," << detail::fmt_double(r.runtime_inner_ms) << ","
       << detail::fmt_double(r.runtime_outer_ms) << "," << (r.retries ? std::to_string(*r.retries) : std::string())
       << "\n";
  }
}

inline std::vector<MetricsReport> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("CSV is empty");
  if (detail::split_csv_line(line) != csv_columns()) throw InvalidInput("CSV header does not match");
  std::vector<MetricsReport> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != csv_columns().size()) throw InvalidInput("CSV row has " + std::to_string(f.size()) + " fields");
    MetricsReport r;
    r.robot = f[0];
    r.level = static_cast<int>(detail::parse_double(f[1], "level"));
    try {
      r.seed = std::stoull(f[2]);
    } catch (const std::exception&) {
      throw InvalidInput("bad seed '" + f[2] + "' in CSV");
    }
    r.method = f[3];
    if (f[4] != "0" && f[4] != "1") throw InvalidInput("bad success flag '" + f[4] + "' in CSV");
    r.success = f[4] == "1";
    if (!f[5].empty()) r.ate = detail::parse_double(f[5], "ate");
    if (!f[6].empty()) r.path_length = detail::parse_double(f[6], "path_length");
    r.runtime_total_ms = detail::parse_double(f[7], "runtime");
    r.runtime_init_ms = detail::parse_double(f[8], "runtime");
    r.runtime_inner_ms = detail::parse_double(f[9], "runtime");
    r.runtime_outer_ms = detail::parse_double(f[10], "runtime");
    if (!f[11].empty()) r.retries = static_cast<int>(detail::parse_double(f[11], "retries"));
    rows.push_back(std::move(r));
  }
  return rows;
}

// Summary statistics.

// Linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double p) {
  require(!v.empty(), "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = p * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline std::optional<LineFit> least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return LineFit{sxy / sxx, my - sxy / sxx * mx};
}

namespace detail {

inline Json quartiles_json(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return Json::array({quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)});
}

inline Json group_json(const std::vector<const MetricsReport*>& rows) {
  std::vector<double> ate, runtime, length;
  double retries = 0.0;
  int with_retries = 0, successes = 0;
  for (const auto* r : rows) {
    runtime.push_back(r->runtime_total_ms);
    if (r->success) ++successes;
    if (r->ate) ate.push_back(*r->ate);
    if (r->path_length) length.push_back(*r->path_length);
    if (r->retries) {
      retries += *r->retries;
      ++with_retries;
    }
  }
  Json g = {{"tasks", rows.size()},
            {"successes", successes},
            {"success_rate", rows.empty() ? 0.0 : static_cast<double>(successes) / rows.size()},
            {"ate_quartiles", quartiles_json(ate)},
            {"runtime_ms_quartiles", quartiles_json(runtime)},
            {"path_length_quartiles", quartiles_json(length)}};
  g["mean_retries"] = with_retries ? Json(retries / with_retries) : Json(nullptr);
  return g;
}

// log10(median runtime in seconds) against level.
inline Json runtime_fit_json(const std::map<int, std::vector<const MetricsReport*>>& by_level) {
  std::vector<double> x, y;
  for (const auto& [level, rows] : by_level) {
    std::vector<double> rt;
    for (const auto* r : rows) rt.push_back(r->runtime_total_ms / 1000.0);
    const double med = quantile(rt, 0.5);
    if (med <= 0.0) continue;
    x.push_back(level);
    y.push_back(std::log10(med));
  }
  const auto fit = least_squares_line(x, y);
  if (!fit) return nullptr;
  return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"levels", x}, {"log10_median_runtime_s", y}};
}

}  // namespace detail

// Per (robot, method, level) and per (method, level) pooled over robots:
// success rate, ATE / runtime / path length quartiles and mean retries, plus
// a log-linear runtime fit per method and per (robot, method).
inline Json summarize(const std::vector<MetricsReport>& rows) {
  std::map<std::string, std::map<std::string, std::map<int, std::vector<const MetricsReport*>>>> per_robot;
  std::map<std::string, std::map<int, std::vector<const MetricsReport*>>> pooled;
  for (const auto& r : rows) {
    per_robot[r.robot][r.method][r.level].push_back(&r);
    pooled[r.method][r.level].push_back(&r);
  }
  Json groups = Json::array(), fits = Json::array();
  for (const auto& [robot, methods] : per_robot)
    for (const auto& [method, levels] : methods) {
      for (const auto& [level, rs] : levels) {
        Json g = detail::group_json(rs);
        g["robot"] = robot;
        g["method"] = method;
        g["level"] = level;
        groups.push_back(g);
      }
      fits.push_back({{"robot", robot}, {"method", method}, {"fit", detail::runtime_fit_json(levels)}});
    }
  Json pooled_groups = Json::array();
  for (const auto& [method, levels] : pooled) {
    for (const auto& [level, rs] : levels) {
      Json g = detail::group_json(rs);
      g["method"] = method;
      g["level"] = level;
      pooled_groups.push_back(g);
    }
    fits.push_back({{"robot", "all"}, {"method", method}, {"fit", detail::runtime_fit_json(levels)}});
  }
  return {{"rows", rows.size()}, {"groups", groups}, {"pooled", pooled_groups}, {"runtime_fit", fits}};
}

}  // namespace bstar
