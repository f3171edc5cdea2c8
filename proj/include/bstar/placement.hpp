#pragma once

// Fixed-base placement by base relaxation: every waypoint gets its own base
// pose, an increasing penalty pulls the bases together, and a final pass
// re-solves the joint trajectory at the averaged base.

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bstar/collision.hpp"
#include "bstar/kinematics.hpp"
#include "bstar/metrics.hpp"
#include "bstar/slp.hpp"

namespace bstar {

enum class ObjectiveKind { kFeasibility, kMinPathLength };

struct RelaxedState {
  std::vector<BaseConfig> bases;
  std::vector<JointConfig> joints;

  std::size_t size() const { return joints.size(); }
};

struct PenaltySchedule {
  double mu0 = 0.01;
  double kappa = 5.0;
  double mu_max = 1e4;
  int j_max = 12;

  double mu(int j) const { return std::min(mu0 * std::pow(kappa, j), mu_max); }

  void validate() const {
    require(mu0 > 0, "mu0 must be positive");
    require(kappa > 1, "kappa must exceed 1");
    require(mu_max >= mu0, "mu_max must be at least mu0");
    require(j_max >= 0, "j_max must be non-negative");
  }
};

struct IkOptions {
  double damping = 1e-3;  // lambda^2
  double step_cap = 0.3;  // infinity-norm cap per iteration
  int max_iterations = 200;
  double tol = 1e-10;  // stop once the residual norm drops below this
};

struct SolveOptions {
  // Base bounds as raw (x, y, theta); theta is not wrapped here so that
  // [-pi, pi] means "any heading".
  Eigen::Vector3d base_lo{-1.0, -1.0, -kPi};
  Eigen::Vector3d base_hi{1.0, 1.0, kPi};
  ObjectiveKind objective_kind = ObjectiveKind::kMinPathLength;
  int max_retries = 10;
  double fix_tol = 1e-6;
  double ee_tol_pos = 1e-4;
  double ee_tol_rot = 1e-4;
  std::uint64_t rng_seed = 0;
  PenaltySchedule schedule;
  InnerOptions inner;
  IkOptions ik;
  double contact_margin = 0.05;  // contacts farther than this stay out of the LP
  // Called after every inner solve with (attempt, outer iteration or -1 for
  // the fixed-base pass, mu, result).
  std::function<void(int, int, double, const InnerResult&)> on_inner;

  bool theta_periodic() const { return base_hi.z() - base_lo.z() >= 2 * kPi - 1e-12; }

  void validate() const {
    require((base_lo.array() <= base_hi.array()).all(), "base bounds must be ordered");
    require((base_lo.z() >= -kPi - 1e-12 && base_hi.z() <= kPi + 1e-12) || theta_periodic(),
            "base heading bounds must lie within [-pi, pi]");
    require(max_retries >= 1, "max_retries must be at least 1");
    require(fix_tol > 0 && ee_tol_pos > 0 && ee_tol_rot > 0, "tolerances must be positive");
    schedule.validate();
  }
};

struct RuntimeBreakdown {
  double initialization = 0.0;  // ms
  double inner_total = 0.0;
  double outer_total = 0.0;
};

struct Diagnostics {
  bool success = false;
  int retries_used = 0;  // attempts made, counting the successful one
  int outer_iterations = 0;
  std::vector<double> base_spread_history;
  double ate_relaxed = 0.0;
  RuntimeBreakdown runtime;
  double path_length = 0.0;
  bool circular_mean_fallback = false;
  int inner_iterations = 0;
  long lp_iterations = 0;
  int merit_increases = 0;
  std::string failure;  // reason for the last failed attempt
};

struct Solution {
  BaseConfig base;
  std::vector<JointConfig> joints;
  Diagnostics diagnostics;
};

struct BaseMean {
  BaseConfig base;
  bool fallback = false;
};

inline BaseMean mean_base_checked(const std::vector<BaseConfig>& bases) {
  require(!bases.empty(), "mean of an empty base list");
  // Accumulated relative to the first base so identical inputs average exactly.
  const BaseConfig& ref = bases.front();
  double x = 0, y = 0, s = 0, c = 0;
  for (const auto& b : bases) {
    x += b.x - ref.x;
    y += b.y - ref.y;
    s += std::sin(b.theta - ref.theta);
    c += std::cos(b.theta - ref.theta);
  }
  const double n = static_cast<double>(bases.size());
  BaseMean m;
  m.fallback = s * s + c * c < 1e-24;
  const double dtheta = m.fallback ? 0.0 : std::atan2(s, c);
  m.base = BaseConfig(ref.x + x / n, ref.y + y / n, ref.theta + dtheta);
  return m;
}

inline BaseConfig mean_base(const std::vector<BaseConfig>& bases) { return mean_base_checked(bases).base; }

inline double base_spread(const std::vector<BaseConfig>& bases) {
  const BaseConfig m = mean_base(bases);
  double spread = 0.0;
  for (const auto& b : bases) {
    spread = std::max({spread, std::abs(b.x - m.x), std::abs(b.y - m.y), std::abs(wrap_angle(b.theta - m.theta))});
  }
  return spread;
}

inline double relaxed_objective(const RelaxedState& state, double mu, ObjectiveKind kind) {
  double f = kind == ObjectiveKind::kFeasibility ? 1.0 : path_length(state.joints);
  if (mu == 0.0) return f;
  const BaseConfig m = mean_base(state.bases);
  double dev = 0.0;
  for (const auto& b : state.bases)
    dev += std::abs(b.x - m.x) + std::abs(b.y - m.y) + std::abs(wrap_angle(b.theta - m.theta));
  return f + mu * dev;
}

// Relaxed (per-waypoint base) or fixed-base trajectory problem in the form
// consumed by inner_solve. Variables per waypoint: [x, y, theta, q] when the
// base is free, [q] when it is fixed.
class PlacementProblem final : public ConstraintSet {
 public:
  PlacementProblem(const RobotModel& robot, const TaskPath& task, const SolveOptions& opt, double mu,
                   std::optional<BaseConfig> fixed_base = std::nullopt)
      : robot_(robot), task_(task), opt_(opt), mu_(mu), fixed_(fixed_base) {}

  int stride() const { return (fixed_ ? 0 : 3) + robot_.dof(); }
  int num_vars() const override { return static_cast<int>(task_.size()) * stride(); }

  Eigen::VectorXd lower() const override { return bounds(true); }
  Eigen::VectorXd upper() const override { return bounds(false); }

  void normalize(Eigen::VectorXd& x) const override {
    if (fixed_ || !opt_.theta_periodic()) return;
    for (std::size_t i = 0; i < task_.size(); ++i) x[i * stride() + 2] = wrap_angle(x[i * stride() + 2]);
  }

  Eigen::VectorXd pack(const RelaxedState& s) const {
    Eigen::VectorXd x(num_vars());
    for (std::size_t i = 0; i < task_.size(); ++i) {
      const int o = static_cast<int>(i) * stride();
      if (!fixed_) x.segment<3>(o) = s.bases[i].vec();
      x.segment(o + (fixed_ ? 0 : 3), robot_.dof()) = s.joints[i];
    }
    return x;
  }

  RelaxedState unpack(const Eigen::VectorXd& x) const {
    RelaxedState s;
    for (std::size_t i = 0; i < task_.size(); ++i) {
      const int o = static_cast<int>(i) * stride();
      s.bases.push_back(fixed_ ? *fixed_ : BaseConfig(x[o], x[o + 1], x[o + 2]));
      s.joints.push_back(x.segment(o + (fixed_ ? 0 : 3), robot_.dof()));
    }
    return s;
  }

  Evaluation evaluate(const Eigen::VectorXd& x, bool with_gradients) const override {
    const int t = static_cast<int>(task_.size());
    const int n = robot_.dof();
    const int st = stride();
    const int qoff = fixed_ ? 0 : 3;
    const RelaxedState s = unpack(x);
    Evaluation e;
    e.constant = opt_.objective_kind == ObjectiveKind::kFeasibility ? 1.0 : 0.0;

    TermBlock pose{TermKind::kEquality, 1.0, Eigen::VectorXd(6 * t), {}};
    TermBlock contact{TermKind::kInequality, 1.0, Eigen::VectorXd(), {}};
    std::vector<double> sd_values;
    for (int i = 0; i < t; ++i) {
      const ChainFrames f = chain_frames(robot_, s.bases[i], s.joints[i]);
      const Pose6 actual = Pose6::from_transform(f.ee);
      pose.value.segment<6>(6 * i) = pose_error(actual, task_.poses[i]);
      Eigen::MatrixXd jp;
      if (with_gradients) {
        jp = pose_error_jacobian(actual, task_.poses[i], jacobian(robot_, f));
        for (int r = 0; r < 6; ++r) pose.rows.push_back(row_from(jp.row(r), i * st, qoff));
      }
      for (const auto& c : signed_distances(robot_, f, true)) {
        sd_values.push_back(c.distance);
        if (!with_gradients) continue;
        if (c.distance >= opt_.contact_margin) {
          contact.rows.emplace_back();
          continue;
        }
        // Coincident witnesses keep the arbitrary normal the contact carries.
        ContactResult cc = c;
        cc.degenerate = false;
        contact.rows.push_back(row_from(sd_gradient(robot_, f, cc), i * st, qoff));
      }
    }
    contact.value = Eigen::Map<Eigen::VectorXd>(sd_values.data(), static_cast<Eigen::Index>(sd_values.size()));
    e.blocks.push_back(std::move(pose));
    e.blocks.push_back(std::move(contact));

    if (opt_.objective_kind == ObjectiveKind::kMinPathLength && t > 1) {
      TermBlock len{TermKind::kObjective, 1.0, Eigen::VectorXd((t - 1) * n), {}};
      for (int i = 0; i + 1 < t; ++i) {
        len.value.segment(i * n, n) = s.joints[i + 1] - s.joints[i];
        if (with_gradients)
          for (int k = 0; k < n; ++k)
            len.rows.push_back({{i * st + qoff + k, -1.0}, {(i + 1) * st + qoff + k, 1.0}});
      }
      e.blocks.push_back(std::move(len));
    }

    if (!fixed_ && mu_ > 0.0 && t > 1) e.blocks.push_back(base_deviation(s, with_gradients));
    return e;
  }

 private:
  Eigen::VectorXd bounds(bool lower) const {
    Eigen::VectorXd b(num_vars());
    const int n = robot_.dof();
    for (std::size_t i = 0; i < task_.size(); ++i) {
      const int o = static_cast<int>(i) * stride();
      if (!fixed_) {
        b[o] = lower ? opt_.base_lo.x() : opt_.base_hi.x();
        b[o + 1] = lower ? opt_.base_lo.y() : opt_.base_hi.y();
        b[o + 2] = opt_.theta_periodic() ? (lower ? -kInf : kInf) : (lower ? opt_.base_lo.z() : opt_.base_hi.z());
      }
      const int q0 = o + (fixed_ ? 0 : 3);
      for (int k = 0; k < n; ++k) b[q0 + k] = lower ? robot_.joints()[k].lo : robot_.joints()[k].hi;
    }
    return b;
  }

  // Maps a gradient over [x_b, y_b, theta_b, q] to this problem's columns.
  SparseRow row_from(const Eigen::RowVectorXd& g, int offset, int qoff) const {
    SparseRow row;
    if (!fixed_)
      for (int c = 0; c < 3; ++c)
        if (g[c] != 0.0) row.emplace_back(offset + c, g[c]);
    for (int k = 0; k < robot_.dof(); ++k)
      if (g[3 + k] != 0.0) row.emplace_back(offset + qoff + k, g[3 + k]);
    return row;
  }

  // mu * sum_i |b_i - mean(b)|, theta via wrapped difference to the
  // circular mean.
  TermBlock base_deviation(const RelaxedState& s, bool with_gradients) const {
    const int t = static_cast<int>(task_.size());
    const int st = stride();
    const BaseMean m = mean_base_checked(s.bases);
    TermBlock b{TermKind::kObjective, mu_, Eigen::VectorXd(3 * t), {}};
    double sn = 0, cs = 0;
    for (const auto& bb : s.bases) {
      sn += std::sin(bb.theta);
      cs += std::cos(bb.theta);
    }
    const double r2 = sn * sn + cs * cs;
    std::vector<double> dmean(t, 0.0);
    for (int k = 0; k < t; ++k)
      dmean[k] = m.fallback ? (k == 0 ? 1.0 : 0.0)
                            : (cs * std::cos(s.bases[k].theta) + sn * std::sin(s.bases[k].theta)) / r2;
    for (int i = 0; i < t; ++i) {
      b.value[3 * i] = s.bases[i].x - m.base.x;
      b.value[3 * i + 1] = s.bases[i].y - m.base.y;
      b.value[3 * i + 2] = wrap_angle(s.bases[i].theta - m.base.theta);
      if (!with_gradients) continue;
      for (int c = 0; c < 3; ++c) {
        SparseRow row;
        for (int k = 0; k < t; ++k) {
          const double d = c < 2 ? (k == i ? 1.0 : 0.0) - 1.0 / t : (k == i ? 1.0 : 0.0) - dmean[k];
          if (d != 0.0) row.emplace_back(k * st + c, d);
        }
        b.rows.push_back(std::move(row));
      }
    }
    return b;
  }

  const RobotModel& robot_;
  const TaskPath& task_;
  const SolveOptions& opt_;
  double mu_;
  std::optional<BaseConfig> fixed_;
};

struct IkResult {
  BaseConfig base;
  JointConfig q;
  double pos_err = 0.0;
  double rot_err = 0.0;
  int iterations = 0;
};

// Damped least squares IK over [x_b, y_b, theta_b, q] (base_free) or q only.
// Joints and base are clamped to their bounds after every step.
inline IkResult dls_ik(const RobotModel& robot, const Pose6& target, BaseConfig base, JointConfig q,
                       const SolveOptions& opt, bool base_free = true) {
  const int n = robot.dof();
  check_dims(robot, q);
  IkResult r;
  const IkOptions& ik = opt.ik;
  for (int it = 0;; ++it) {
    const ChainFrames f = chain_frames(robot, base, q);
    const Pose6 actual = Pose6::from_transform(f.ee);
    const Vec6 e = pose_error(actual, target);
    r.pos_err = e.head<3>().norm();
    r.rot_err = e.tail<3>().norm();
    r.iterations = it;
    if (e.norm() < ik.tol || it >= ik.max_iterations) break;
    Eigen::MatrixXd j = pose_error_jacobian(actual, target, jacobian(robot, f));
    if (!base_free) j = j.rightCols(n).eval();
    const Eigen::Matrix<double, 6, 6> jjt = j * j.transpose() + ik.damping * Eigen::Matrix<double, 6, 6>::Identity();
    Eigen::VectorXd step = -j.transpose() * jjt.ldlt().solve(e);
    const double cap = step.lpNorm<Eigen::Infinity>();
    if (cap > ik.step_cap) step *= ik.step_cap / cap;
    if (base_free) {
      const double th = base.theta + step[2];
      base = BaseConfig(std::clamp(base.x + step[0], opt.base_lo.x(), opt.base_hi.x()),
                        std::clamp(base.y + step[1], opt.base_lo.y(), opt.base_hi.y()),
                        opt.theta_periodic() ? th : std::clamp(th, opt.base_lo.z(), opt.base_hi.z()));
    }
    q += step.tail(n);
    for (int k = 0; k < n; ++k) q[k] = std::clamp(q[k], robot.joints()[k].lo, robot.joints()[k].hi);
  }
  r.base = base;
  r.q = q;
  return r;
}

inline BaseConfig random_base_in(const SolveOptions& opt, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(opt.base_lo.x(), opt.base_hi.x());
  std::uniform_real_distribution<double> uy(opt.base_lo.y(), opt.base_hi.y());
  std::uniform_real_distribution<double> ut(opt.base_lo.z(), opt.base_hi.z());
  const double x = ux(rng), y = uy(rng);
  return BaseConfig(x, y, ut(rng));
}

inline JointConfig random_joints_in(const RobotModel& robot, std::mt19937_64& rng) {
  JointConfig q(robot.dof());
  for (int k = 0; k < robot.dof(); ++k) {
    std::uniform_real_distribution<double> u(robot.joints()[k].lo, robot.joints()[k].hi);
    q[k] = u(rng);
  }
  return q;
}

// Chained relaxed IK: the first waypoint from a random seed, every later
// waypoint from its predecessor's solution.
inline RelaxedState initialize(const TaskPath& task, const RobotModel& robot, const SolveOptions& opt,
                               std::mt19937_64& rng) {
  require(task.size() >= 1, "task has no poses");
  RelaxedState s;
  BaseConfig b = random_base_in(opt, rng);
  JointConfig q = random_joints_in(robot, rng);
  for (std::size_t i = 0; i < task.size(); ++i) {
    const IkResult r = dls_ik(robot, task.poses[i], b, q, opt);
    if (r.pos_err > 10 * opt.ee_tol_pos || r.rot_err > 10 * opt.ee_tol_rot)
      throw InitializationFailed("IK did not reach waypoint " + std::to_string(i) + " (position error " +
                                 std::to_string(r.pos_err) + " m)");
    b = r.base;
    q = r.q;
    s.bases.push_back(b);
    s.joints.push_back(q);
  }
  return s;
}

struct VerifyReport {
  double max_pos_err = 0.0;
  double max_rot_err = 0.0;
  double min_sd = kInf;
  bool joints_ok = true;
  bool base_ok = true;
  bool ok = false;
};

inline VerifyReport verify(const RobotModel& robot, const TaskPath& task, const BaseConfig& base,
                           const std::vector<JointConfig>& joints, const SolveOptions& opt) {
  VerifyReport v;
  if (joints.size() != task.size()) return v;
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (joints[i].size() != robot.dof()) return v;
    const Vec6 e = pose_error(fk(robot, base, joints[i]), task.poses[i]);
    v.max_pos_err = std::max(v.max_pos_err, e.head<3>().norm());
    v.max_rot_err = std::max(v.max_rot_err, e.tail<3>().norm());
    for (int k = 0; k < robot.dof(); ++k)
      if (joints[i][k] < robot.joints()[k].lo || joints[i][k] > robot.joints()[k].hi) v.joints_ok = false;
    v.min_sd = std::min(v.min_sd, min_signed_distance(robot, base, joints[i]));
  }
  v.base_ok = base.x >= opt.base_lo.x() && base.x <= opt.base_hi.x() && base.y >= opt.base_lo.y() &&
              base.y <= opt.base_hi.y() &&
              (opt.theta_periodic() || (base.theta >= opt.base_lo.z() && base.theta <= opt.base_hi.z()));
  v.ok = v.max_pos_err < opt.ee_tol_pos && v.max_rot_err < opt.ee_tol_rot && v.joints_ok && v.base_ok &&
         v.min_sd >= -1e-6;
  return v;
}

inline Solution solve(const TaskPath& task, const RobotModel& robot, const SolveOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  const auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  opt.validate();
  require(task.size() >= 1, "task has no poses");
  const auto t_start = Clock::now();
  std::mt19937_64 rng(opt.rng_seed);
  Solution best;
  Diagnostics& d = best.diagnostics;

  const auto run_inner = [&](const PlacementProblem& p, const Eigen::VectorXd& x, int attempt, int j, double mu) {
    const auto t0 = Clock::now();
    InnerResult r = inner_solve(x, p, opt.inner);
    d.runtime.inner_total += ms_since(t0);
    d.inner_iterations += r.iterations;
    d.lp_iterations += r.lp_iterations;
    d.merit_increases += r.merit_increases;
    if (opt.on_inner) opt.on_inner(attempt, j, mu, r);
    return r;
  };

  for (int attempt = 1; attempt <= opt.max_retries; ++attempt) {
    d.retries_used = attempt;
    RelaxedState state;
    const auto t_init = Clock::now();
    try {
      state = initialize(task, robot, opt, rng);
    } catch (const InitializationFailed& e) {
      d.runtime.initialization += ms_since(t_init);
      d.failure = e.what();
      continue;
    }
    d.runtime.initialization += ms_since(t_init);

    d.base_spread_history.clear();
    d.outer_iterations = 0;
    for (int j = 0; j <= opt.schedule.j_max; ++j) {
      const double mu = opt.schedule.mu(j);
      const PlacementProblem p(robot, task, opt, mu);
      const InnerResult r = run_inner(p, p.pack(state), attempt, j, mu);
      state = p.unpack(r.x);
      ++d.outer_iterations;
      const double spread = base_spread(state.bases);
      d.base_spread_history.push_back(spread);
      if (spread < opt.fix_tol) break;
    }
    d.ate_relaxed = ate(state.bases);
    const BaseMean m = mean_base_checked(state.bases);
    d.circular_mean_fallback = m.fallback;

    const PlacementProblem fixed(robot, task, opt, 0.0, m.base);
    const InnerResult r = run_inner(fixed, fixed.pack(state), attempt, -1, 0.0);
    const RelaxedState final_state = fixed.unpack(r.x);
    const VerifyReport v = verify(robot, task, m.base, final_state.joints, opt);
    best.base = m.base;
    best.joints = final_state.joints;
    d.path_length = path_length(best.joints);
    if (v.ok) {
      d.success = true;
      d.failure.clear();
      break;
    }
    d.failure = "verification failed (position error " + std::to_string(v.max_pos_err) + " m, min distance " +
                std::to_string(v.min_sd) + " m)";
  }
  d.runtime.outer_total = ms_since(t_start);
  return best;
}

}  // namespace bstar
