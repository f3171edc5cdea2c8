#pragma once

// Sampling baseline: a database of relaxed-base IK solutions per waypoint,
// then an exhaustive layered search for the shortest joint path whose entry
// bases all agree with the first waypoint's base within a tolerance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bstar/collision.hpp"
#include "bstar/kinematics.hpp"
#include "bstar/metrics.hpp"
#include "bstar/placement.hpp"
#include "bstar/seeding.hpp"

namespace bstar {

struct IkEntry {
  BaseConfig base;
  JointConfig q;
};

struct IKDatabase {
  std::vector<std::vector<IkEntry>> per_waypoint;
  int gamma = 0;

  bool has_empty_layer() const {
    return std::any_of(per_waypoint.begin(), per_waypoint.end(), [](const auto& l) { return l.empty(); });
  }

  // The first `g` entries of every layer; a database sampled with a larger
  // gamma and the same seed contains the smaller one as this prefix unless
  // the smaller run hit its attempt cap.
  IKDatabase truncated(int g) const {
    IKDatabase out;
    out.gamma = g;
    for (const auto& l : per_waypoint)
      out.per_waypoint.emplace_back(l.begin(), l.begin() + std::min<std::size_t>(l.size(), g));
    return out;
  }
};

struct BaselineOptions {
  int gamma = 100;
  double base_tol_trans = 0.01;  // m
  double base_tol_rot = 0.05;    // rad
  double time_limit = 600.0;     // s, search wall clock
  int attempt_factor = 50;       // IK attempts per waypoint = attempt_factor * gamma
  double dedup_resolution = 1e-3;
  int workers = 1;  // threads for database sampling
  SolveOptions solve;  // base bounds, pose tolerances and IK settings

  void validate() const {
    require(gamma >= 1, "gamma must be positive");
    require(base_tol_trans > 0 && base_tol_rot > 0, "base tolerances must be positive");
    require(time_limit > 0, "time limit must be positive");
    require(attempt_factor >= 1 && dedup_resolution > 0 && workers >= 1, "sampling settings must be positive");
    solve.validate();
  }
};

namespace detail {

inline std::vector<IkEntry> sample_layer(const Pose6& target, const RobotModel& robot, const BaselineOptions& opt,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<IkEntry> out;
  std::set<std::vector<long long>> seen;
  const long attempts = static_cast<long>(opt.attempt_factor) * opt.gamma;
  for (long a = 0; a < attempts && static_cast<int>(out.size()) < opt.gamma; ++a) {
    const BaseConfig b0 = random_base_in(opt.solve, rng);
    const JointConfig q0 = random_joints_in(robot, rng);
    const IkResult r = dls_ik(robot, target, b0, q0, opt.solve);
    if (r.pos_err >= opt.solve.ee_tol_pos || r.rot_err >= opt.solve.ee_tol_rot) continue;
    if (min_signed_distance(robot, r.base, r.q) < 0.0) continue;
    std::vector<long long> key{std::llround(r.base.x / opt.dedup_resolution),
                               std::llround(r.base.y / opt.dedup_resolution),
                               std::llround(r.base.theta / opt.dedup_resolution)};
    for (int k = 0; k < r.q.size(); ++k) key.push_back(std::llround(r.q[k] / opt.dedup_resolution));
    if (!seen.insert(std::move(key)).second) continue;
    out.push_back({r.base, r.q});
  }
  return out;
}

}  // namespace detail

// Layers are sampled independently, each from a generator derived from one
// draw of `rng` and the waypoint index, so the result does not depend on the
// number of workers.
inline IKDatabase sample_ik_database(const TaskPath& task, const RobotModel& robot, const BaselineOptions& opt,
                                     std::mt19937_64& rng) {
  opt.validate();
  require(task.size() >= 1, "task has no poses");
  const std::uint64_t seed = rng();
  IKDatabase db;
  db.gamma = opt.gamma;
  db.per_waypoint.resize(task.size());
  const int workers = std::min<int>(opt.workers, static_cast<int>(task.size()));
  const auto work = [&](int w) {
    for (std::size_t i = w; i < task.size(); i += workers)
      db.per_waypoint[i] = detail::sample_layer(task.poses[i], robot, opt, derive_seed(seed, i));
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  return db;
}

enum class BaselineStatus { kSuccess, kNoConsistentBase, kTimeout, kEmptyLayer };

inline const char* to_string(BaselineStatus s) {
  switch (s) {
    case BaselineStatus::kSuccess:
      return "success";
    case BaselineStatus::kNoConsistentBase:
      return "no-consistent-base";
    case BaselineStatus::kTimeout:
      return "timeout";
    case BaselineStatus::kEmptyLayer:
      return "empty-layer";
  }
  return "unknown";
}

struct BaselineResult {
  BaselineStatus status = BaselineStatus::kNoConsistentBase;
  Solution solution;               // base = anchor base
  std::vector<int> entries;        // chosen entry per waypoint
  std::vector<BaseConfig> bases;   // entry bases actually used
  double cost = std::numeric_limits<double>::infinity();
  double ate = 0.0;                // over `bases`
  long expanded = 0;               // nodes expanded

  bool success() const { return status == BaselineStatus::kSuccess; }
};

// Per translation component, and the wrapped heading difference.
inline bool within_base_tol(const BaseConfig& a, const BaseConfig& b, const BaselineOptions& opt) {
  return std::abs(a.x - b.x) <= opt.base_tol_trans && std::abs(a.y - b.y) <= opt.base_tol_trans &&
         std::abs(wrap_angle(a.theta - b.theta)) <= opt.base_tol_rot;
}

// For every anchor in the first layer, the entries of later layers that agree
// with it form a layered graph; a backward sweep gives every node's optimal
// cost to go, and the forward walk takes the lowest-index optimal successor,
// so among equal-cost paths the lexicographically smallest index sequence
// wins. Anchors are scanned in index order and replaced only on strict
// improvement.
inline BaselineResult bfs_optimal(const IKDatabase& db, const BaselineOptions& opt) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(opt.time_limit));
  BaselineResult best;
  const std::size_t t = db.per_waypoint.size();
  require(t >= 1, "database has no layers");
  if (db.has_empty_layer()) {
    best.status = BaselineStatus::kEmptyLayer;
    return best;
  }
  const auto& layers = db.per_waypoint;
  std::vector<std::vector<int>> nodes(t);
  std::vector<std::vector<double>> to_go(t);
  for (std::size_t a = 0; a < layers[0].size(); ++a) {
    const BaseConfig& anchor = layers[0][a].base;
    nodes[0] = {static_cast<int>(a)};
    bool complete = true;
    for (std::size_t i = 1; i < t && complete; ++i) {
      nodes[i].clear();
      for (std::size_t e = 0; e < layers[i].size(); ++e)
        if (within_base_tol(anchor, layers[i][e].base, opt)) nodes[i].push_back(static_cast<int>(e));
      complete = !nodes[i].empty();
    }
    if (!complete) continue;

    to_go[t - 1].assign(nodes[t - 1].size(), 0.0);
    for (std::size_t i = t - 1; i-- > 0;) {
      to_go[i].assign(nodes[i].size(), std::numeric_limits<double>::infinity());
      for (std::size_t u = 0; u < nodes[i].size(); ++u) {
        if (Clock::now() > deadline) {
          best.status = BaselineStatus::kTimeout;
          return best;
        }
        ++best.expanded;
        const JointConfig& q = layers[i][nodes[i][u]].q;
        for (std::size_t v = 0; v < nodes[i + 1].size(); ++v)
          to_go[i][u] = std::min(to_go[i][u], (layers[i + 1][nodes[i + 1][v]].q - q).lpNorm<1>() + to_go[i + 1][v]);
      }
    }
    if (!(to_go[0][0] < best.cost)) continue;

    best.cost = to_go[0][0];
    best.entries = {static_cast<int>(a)};
    std::size_t u = 0;
    for (std::size_t i = 0; i + 1 < t; ++i) {
      const JointConfig& q = layers[i][nodes[i][u]].q;
      const double target = to_go[i][u];
      std::size_t pick = 0;
      double pick_gap = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < nodes[i + 1].size(); ++v) {
        // The exact minimizer reproduces `target`; keep the first one.
        const double gap = std::abs((layers[i + 1][nodes[i + 1][v]].q - q).lpNorm<1>() + to_go[i + 1][v] - target);
        if (gap < pick_gap) {
          pick_gap = gap;
          pick = v;
          if (gap == 0.0) break;
        }
      }
      u = pick;
      best.entries.push_back(nodes[i + 1][u]);
    }
  }
  if (best.entries.empty()) {
    best.status = BaselineStatus::kNoConsistentBase;
    return best;
  }
  best.status = BaselineStatus::kSuccess;
  Solution& s = best.solution;
  s.base = layers[0][best.entries[0]].base;
  for (std::size_t i = 0; i < t; ++i) {
    const IkEntry& e = layers[i][best.entries[i]];
    s.joints.push_back(e.q);
    best.bases.push_back(e.base);
  }
  best.ate = ate(best.bases);
  s.diagnostics.success = true;
  s.diagnostics.retries_used = 1;
  s.diagnostics.path_length = path_length(s.joints);
  s.diagnostics.ate_relaxed = best.ate;
  s.diagnostics.runtime.outer_total = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return best;
}

}  // namespace bstar
