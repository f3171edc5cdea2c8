// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// The suite is 3 fixtures x levels 1-4 x 25 generated tasks with B* and the
// b-10 / b-100 / b-1000 baselines. Every threshold below is fixed in advance.

#include <Eigen/Geometry>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bstar/bench.hpp"
#include "bstar/robot_io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace bstar;

constexpr std::uint64_t kMasterSeed = 20240611;
constexpr int kTasksPerLevel = 25;
const std::vector<int> kLevels = {1, 2, 3, 4};
const std::vector<std::string> kMethods = {"bstar", "b-10", "b-100", "b-1000"};

int failures = 0;

void criterion(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double median(std::vector<double> v) { return v.empty() ? std::nan("") : quantile(std::move(v), 0.5); }

std::vector<const BenchCell*> select(const BenchmarkResult& r, const std::string& method, int level = 0) {
  std::vector<const BenchCell*> out;
  for (const auto& c : r.cells)
    if (c.row.method == method && (level == 0 || c.row.level == level)) out.push_back(&c);
  return out;
}

int successes(const std::vector<const BenchCell*>& cells) {
  int n = 0;
  for (const auto* c : cells) n += c->row.success;
  return n;
}

std::string csv_without_runtimes(std::vector<MetricsReport> rows) {
  for (auto& r : rows) r.runtime_total_ms = r.runtime_init_ms = r.runtime_inner_ms = r.runtime_outer_ms = 0.0;
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

// Merit sequence of every inner solve, checked outside the solver: iterates
// only change on accepted steps and each one must not raise the merit.
struct MeritMonitor {
  std::atomic<long> solves{0};
  std::atomic<long> accepted{0};
  std::atomic<long> increases{0};

  void observe(const InnerResult& r) {
    ++solves;
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      if (!r.trace[k].accepted) continue;
      ++accepted;
      const double after = k + 1 < r.trace.size() ? r.trace[k + 1].merit : r.merit;
      if (after > r.trace[k].merit) ++increases;
    }
  }
};

BenchmarkResult run_suite(int workers, MeritMonitor* monitor) {
  BenchOptions opt;
  opt.workers = workers;
  opt.baseline_time_limit = 60.0;
  opt.keep_solutions = true;
  if (monitor) opt.solve.on_inner = [monitor](int, int, double, const InnerResult& r) { monitor->observe(r); };
  opt.on_progress = [](std::size_t done, std::size_t total) {
    if (done % 100 == 0 || done == total) std::fprintf(stderr, "  %zu/%zu cells\n", done, total);
  };
  return run_benchmark(make_suite(fixture_ids(), kLevels, kTasksPerLevel, kMasterSeed), kMethods, opt);
}

// Post-hoc evaluation of a B* solution with its own pose comparison.
struct GateResult {
  double pos = 0.0, rot = 0.0, min_sd = kInf;
  bool limits = true, bounds = true;
};

GateResult evaluate(const RobotModel& robot, const TaskPath& task, const Solution& s) {
  GateResult g;
  const SolveOptions defaults;
  if (s.joints.size() != task.size()) {
    g.limits = false;
    return g;
  }
  for (std::size_t i = 0; i < task.size(); ++i) {
    const Transform actual = chain_frames(robot, s.base, s.joints[i]).ee;
    const Mat3 target = so3_exp(task.poses[i].orientation);
    g.pos = std::max(g.pos, (actual.translation() - task.poses[i].position).norm());
    g.rot = std::max(g.rot, Eigen::AngleAxisd(target.transpose() * actual.linear()).angle());
    for (int k = 0; k < robot.dof(); ++k)
      g.limits = g.limits && s.joints[i][k] >= robot.joints()[k].lo && s.joints[i][k] <= robot.joints()[k].hi;
    g.min_sd = std::min(g.min_sd, min_signed_distance(robot, s.base, s.joints[i]));
  }
  g.bounds = s.base.x >= defaults.base_lo.x() && s.base.x <= defaults.base_hi.x() &&
             s.base.y >= defaults.base_lo.y() && s.base.y <= defaults.base_hi.y();
  return g;
}

void lp_oracle(std::string& detail, bool& ok) {
  std::mt19937_64 rng(7001);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int mismatched = 0, feasible = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 5, m = 8;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < a.size(); ++i) a(i) = u(rng);
    Eigen::VectorXd lo(n), hi(n), x0(n), c(n);
    for (int j = 0; j < n; ++j) {
      lo[j] = -1.0 - 0.5 * std::abs(u(rng));
      hi[j] = 1.0 + 0.5 * std::abs(u(rng));
      x0[j] = 2.0 * u(rng);
      c[j] = u(rng);
    }
    Eigen::VectorXd b = a * x0;
    for (int i = 0; i < m; ++i) b[i] += 0.65 * u(rng) + 0.35;
    LPBuilder lb;
    for (int j = 0; j < n; ++j) lb.add_variable(lo[j], hi[j], c[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, a(i, j));
      lb.add_le(row, b[i]);
    }
    const LPSolution s = solve_lp(lb.build());
    const double oracle = testing::vertex_enumeration_min(c, a, b, lo, hi);
    if (oracle == kInf) {
      mismatched += s.status != LPStatus::kInfeasible;
      continue;
    }
    ++feasible;
    if (s.status != LPStatus::kOptimal) {
      ++mismatched;
      continue;
    }
    worst = std::max(worst, std::abs(s.objective - oracle));
  }
  ok = ok && mismatched == 0 && worst <= 1e-8;
  detail += "(a) LP " + std::to_string(feasible) + "/200 feasible, status mismatches " + std::to_string(mismatched) +
            ", max |obj diff| " + fmt("%.1e", worst);
}

void bfs_oracle(std::string& detail, bool& ok) {
  std::mt19937_64 rng(7002);
  const int shapes[][2] = {{2, 30}, {3, 10}, {4, 5}, {5, 4}, {2, 500}, {10, 2}};
  int instances = 0, solved = 0, mismatched = 0;
  for (int trial = 0; trial < 240; ++trial) {
    const auto [t, gamma] = shapes[trial % 6];
    const IKDatabase db = testing::random_database(rng, t, gamma, 3, trial % 2 == 0);
    const BaselineResult r = bfs_optimal(db, BaselineOptions());
    const testing::Enumerated e = testing::enumerate_paths(db);
    ++instances;
    if (r.success() != std::isfinite(e.cost)) {
      ++mismatched;
      continue;
    }
    if (!r.success()) continue;
    ++solved;
    if (std::abs(r.cost - e.cost) > 1e-12 || r.entries != e.entries) ++mismatched;
  }
  ok = ok && mismatched == 0;
  detail += "; (b) BFS " + std::to_string(instances) + " instances with t*gamma <= 1000 (" + std::to_string(solved) +
            " solvable), mismatches " + std::to_string(mismatched);
}

void derivative_oracles(std::string& detail, bool& ok) {
  std::mt19937_64 rng(7003);
  const auto ids = fixture_ids();
  double jac_worst = 0.0, sd_worst = 0.0;
  int contacts = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RobotModel r = trial % 2 == 0 ? load_fixture(ids[trial / 2 % ids.size()])
                                        : testing::random_robot(rng, 1 + trial % 7, true);
    const BaseConfig b = testing::random_base(rng);
    const JointConfig q = testing::random_config(rng, r);
    jac_worst = std::max(jac_worst, testing::rel_error(jacobian(r, b, q), testing::fd_jacobian(r, b, q)));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const RobotModel r = load_fixture(ids[trial % ids.size()]);
    const auto [err, n] =
        testing::sd_gradient_fd_error(r, testing::random_base(rng), testing::random_config(rng, r));
    sd_worst = std::max(sd_worst, err);
    contacts += n;
  }
  ok = ok && jac_worst < 1e-5 && sd_worst < 1e-4;
  detail += "; (c) Jacobian max rel err " + fmt("%.1e", jac_worst) + " over 100 configs, sd gradient max rel err " +
            fmt("%.1e", sd_worst) + " over " + std::to_string(contacts) + " contacts";
}

void planar_oracle(std::string& detail, bool& ok) {
  // The first level-1 planar3 task of generator seed 4.
  const RobotModel r = load_fixture("planar3");
  std::mt19937_64 gen(4);
  GenParams gp;
  gp.level = 1;
  const TaskPath task = gen_random_task(r, gp, gen);
  const auto oracle = testing::planar_two_pose_oracle(r, task, 1.0, 0.005, 0.01);
  const Solution s = solve(task, r);
  const double gap = (s.diagnostics.path_length - oracle.length) / oracle.length;
  ok = ok && s.diagnostics.success && std::abs(gap) <= 0.02;
  detail += "; (d) planar t=2 path length " + fmt("%.5f", s.diagnostics.path_length) + " vs grid oracle " +
            fmt("%.5f", oracle.length) + " (gap " + fmt("%+.2f%%", 100 * gap) + ")";
}

int affine_one_step() {
  std::mt19937_64 rng(7004);
  std::uniform_real_distribution<double> u(-1, 1);
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4, m = 1 + trial % n;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < a.size(); ++i) a(i) = u(rng);
    Eigen::VectorXd target(n);
    for (int j = 0; j < n; ++j) target[j] = 0.03 * u(rng);
    const Eigen::VectorXd b = a * target;
    FunctionalConstraintSet cs(n);
    cs.add(TermKind::kEquality, 1.0, [a, b](const Eigen::VectorXd& x, Eigen::MatrixXd* jac) {
      if (jac) *jac = a;
      return Eigen::VectorXd(a * x - b);
    });
    cs.add(TermKind::kObjective, 0.01, [](const Eigen::VectorXd& x, Eigen::MatrixXd* jac) {
      if (jac) *jac = Eigen::MatrixXd::Identity(x.size(), x.size());
      return x;
    });
    const InnerResult r = inner_solve(Eigen::VectorXd::Zero(n), cs);
    int accepted = 0;
    for (const auto& it : r.trace) accepted += it.accepted;
    if (!r.converged || accepted != 1 || (a * r.x - b).norm() > 1e-9) ++bad;
  }
  return bad;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  std::fprintf(stderr, "running suite (%zu fixtures x %zu levels x %d tasks, %zu methods)\n", fixture_ids().size(),
               kLevels.size(), kTasksPerLevel, kMethods.size());
  MeritMonitor monitor;
  const BenchmarkResult suite = run_suite(1, &monitor);
  const double suite_s = std::chrono::duration<double>(Clock::now() - t0).count();

  // 1. Success rate.
  {
    const auto cells = select(suite, "bstar");
    double bstar_ms = 0.0;
    for (const auto* c : cells) bstar_ms += c->row.runtime_total_ms;
    const int ok = successes(cells);
    std::string per_level;
    for (int l : kLevels) {
      const auto lc = select(suite, "bstar", l);
      per_level += (per_level.empty() ? "" : ", ") + ("L" + std::to_string(l)) + " " +
                   std::to_string(successes(lc)) + "/" + std::to_string(lc.size());
    }
    criterion(1, ok == static_cast<int>(cells.size()) && bstar_ms < 15 * 60 * 1000.0,
              "B* succeeded on " + std::to_string(ok) + "/" + std::to_string(cells.size()) + " tasks (" + per_level +
                  "), B* wall clock " + fmt("%.1f", bstar_ms / 1000) + " s (limit 900 s)");
  }

  // 2. Optimality gap at level 2.
  {
    std::vector<double> bstar_ate, base_ate;
    for (const auto* c : select(suite, "bstar", 2))
      if (c->row.success) bstar_ate.push_back(c->solution->diagnostics.ate_relaxed);
    for (const auto* c : select(suite, "b-100", 2))
      if (c->row.success) base_ate.push_back(*c->row.ate);
    const double mb = median(bstar_ate), mc = median(base_ate);
    const bool ok = !bstar_ate.empty() && !base_ate.empty() && mb < 1e-6 && mc >= 1e-4 && mc / mb >= 1e2;
    criterion(2, ok,
              "level 2: median B* relaxed ATE " + fmt("%.2e", mb) + " over " + std::to_string(bstar_ate.size()) +
                  " solutions; median b-100 ATE " +
                  (base_ate.empty() ? std::string("undefined (b-100 solved 0 of ") +
                                          std::to_string(select(suite, "b-100", 2).size()) + " tasks)"
                                    : fmt("%.2e", mc) + " over " + std::to_string(base_ate.size()) + " solutions") +
                  "; thresholds < 1e-6, >= 1e-4, ratio >= 1e2");
  }

  // 3. Baseline degradation.
  {
    const int s10 = successes(select(suite, "b-10", 1)), s100 = successes(select(suite, "b-100", 1));
    const int s1000 = successes(select(suite, "b-1000", 1)), s1000_top = successes(select(suite, "b-1000", 4));
    const int n = static_cast<int>(select(suite, "b-10", 1).size());
    const bool ok = s10 < s100 && s100 < s1000 && s1000_top < 0.5 * s1000;
    criterion(3, ok,
              "level 1 successes b-10 " + std::to_string(s10) + ", b-100 " + std::to_string(s100) + ", b-1000 " +
                  std::to_string(s1000) + " of " + std::to_string(n) + "; b-1000 at level 4 " +
                  std::to_string(s1000_top) + " (must be < " + fmt("%.1f", 0.5 * s1000) + ")");
  }

  // 4. Runtime scaling.
  {
    std::vector<double> x, y;
    std::string medians;
    for (int l : kLevels) {
      std::vector<double> rt;
      for (const auto* c : select(suite, "bstar", l)) rt.push_back(c->row.runtime_total_ms / 1000.0);
      x.push_back(l);
      y.push_back(std::log10(median(rt)));
      medians += (medians.empty() ? "" : ", ") + fmt("%.3f s", median(rt));
    }
    const auto fit = least_squares_line(x, y);
    const bool ok = fit && fit->slope >= 0.2 && fit->slope <= 0.7;
    criterion(4, ok,
              "median B* runtime per level " + medians + "; fit log10(t) = " + fmt("%.3f", fit ? fit->slope : 0) +
                  " l " + fmt("%+.3f", fit ? fit->intercept : 0) + " (slope must lie in [0.2, 0.7])");
  }

  // 5. Retry growth.
  {
    std::vector<double> means;
    std::string text;
    for (int l : kLevels) {
      double sum = 0.0;
      const auto cells = select(suite, "bstar", l);
      for (const auto* c : cells) sum += c->row.retries.value_or(0);
      means.push_back(sum / cells.size());
      text += (text.empty() ? "" : ", ") + fmt("%.2f", means.back());
    }
    bool monotone = true;
    for (std::size_t k = 1; k < means.size(); ++k) monotone = monotone && means[k] >= means[k - 1];
    criterion(5, monotone && means.back() <= 4.0,
              "mean retries per level " + text + " (non-decreasing, top level <= 4)");
  }

  // 6. Verification gate.
  {
    int checked = 0, violations = 0;
    double pos = 0.0, rot = 0.0, sd = kInf;
    for (const auto* c : select(suite, "bstar")) {
      if (!c->row.success) continue;
      const GateResult g = evaluate(load_fixture(c->row.robot), *c->task, *c->solution);
      ++checked;
      pos = std::max(pos, g.pos);
      rot = std::max(rot, g.rot);
      sd = std::min(sd, g.min_sd);
      if (!(g.pos < 1e-4 && g.rot < 1e-4 && g.limits && g.bounds && g.min_sd >= -1e-6)) ++violations;
    }
    criterion(6, checked > 0 && violations == 0,
              std::to_string(checked) + " B* solutions re-evaluated: max pose error " + fmt("%.1e", pos) + " m / " +
                  fmt("%.1e", rot) + " rad, min signed distance " + fmt("%.4f", sd) + " m, violations " +
                  std::to_string(violations));
  }

  // 7. Oracle equivalences.
  {
    std::string detail;
    bool ok = true;
    lp_oracle(detail, ok);
    bfs_oracle(detail, ok);
    derivative_oracles(detail, ok);
    planar_oracle(detail, ok);
    criterion(7, ok, detail);
  }

  // 8. Inner-loop properties.
  {
    int reported = 0;
    for (const auto* c : select(suite, "bstar")) reported += c->merit_increases;
    const int bad_affine = affine_one_step();
    criterion(8, monitor.increases == 0 && reported == 0 && monitor.solves > 0 && bad_affine == 0,
              std::to_string(monitor.solves.load()) + " inner solves, " + std::to_string(monitor.accepted.load()) +
                  " accepted steps, merit increases " + std::to_string(monitor.increases.load()) +
                  "; affine problems not solved in one accepted step: " + std::to_string(bad_affine) + "/50");
  }

  // 9. Determinism across worker counts.
  {
    std::fprintf(stderr, "re-running suite with 8 workers\n");
    const BenchmarkResult again = run_suite(8, nullptr);
    const std::string a = csv_without_runtimes(suite.rows()), b = csv_without_runtimes(again.rows());
    criterion(9, a == b,
              "suite CSV with 1 and 8 workers (" + std::to_string(suite.cells.size()) + " rows, runtime columns " +
                  "excluded) " + (a == b ? "identical" : "differs"));
  }

  std::printf("suite time %.0f s, total %.0f s; %d criteria failed\n", suite_s,
              std::chrono::duration<double>(Clock::now() - t0).count(), failures);
  return failures == 0 ? 0 : 1;
}
