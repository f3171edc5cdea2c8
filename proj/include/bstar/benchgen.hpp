#pragma once

// Random and parametric end-effector paths for benchmarks and demos.

#include <random>
#include <vector>

#include "bstar/collision.hpp"
#include "bstar/kinematics.hpp"
#include "bstar/placement.hpp"

namespace bstar {

struct GenParams {
  double perturb_mean = 0.01;  // rad, every joint
  double perturb_std = 0.005;
  int level = 1;  // path length t = 2^level
  // Generating configurations must keep at least this much clearance, so
  // that every task is solvable with a collision-free trajectory.
  double clearance = 0.02;
  double max_step = 0.2;  // largest joint change between consecutive poses
  int max_attempts = 1000;

  int length() const { return 1 << level; }

  void validate() const {
    require(perturb_std > 0, "perturbation std must be positive");
    require(level >= 1 && level <= 20, "level must lie in [1, 20]");
  }
};

struct GeneratedTask {
  TaskPath task;
  std::vector<JointConfig> joints;  // generating configuration, base at the origin
};

// Draws one perturbation; components whose cumulative value would leave the
// joint limits are redrawn a few times and clamped as a last resort.
inline JointConfig perturb_within_limits(const RobotModel& robot, const JointConfig& q, const GenParams& p,
                                         std::mt19937_64& rng) {
  std::normal_distribution<double> xi(p.perturb_mean, p.perturb_std);
  JointConfig next(robot.dof());
  for (int k = 0; k < robot.dof(); ++k) {
    const auto& j = robot.joints()[k];
    double v = q[k] + xi(rng);
    for (int tries = 0; tries < 100 && (v < j.lo || v > j.hi); ++tries) v = q[k] + xi(rng);
    next[k] = std::clamp(v, j.lo, j.hi);
  }
  return next;
}

// Relaxed-base IK reaches every pose from its generating configuration and
// consecutive configurations stay close.
inline bool task_feasible(const RobotModel& robot, const GeneratedTask& g, const GenParams& p) {
  SolveOptions opt;
  for (std::size_t i = 0; i < g.task.size(); ++i) {
    const IkResult r = dls_ik(robot, g.task.poses[i], BaseConfig(), g.joints[i], opt);
    if (r.pos_err > 1e-6 || r.rot_err > 1e-6) return false;
    if (i > 0 && (g.joints[i] - g.joints[i - 1]).lpNorm<Eigen::Infinity>() >= p.max_step) return false;
  }
  return true;
}

inline GeneratedTask gen_random_task_with_joints(const RobotModel& robot, const GenParams& p, std::mt19937_64& rng) {
  p.validate();
  const int t = p.length();
  for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
    GeneratedTask g;
    JointConfig q = random_joints_in(robot, rng);
    bool clear = true;
    for (int i = 0; i < t && clear; ++i) {
      if (i > 0) q = perturb_within_limits(robot, q, p, rng);
      clear = min_signed_distance(robot, BaseConfig(), q) >= p.clearance;
      g.joints.push_back(q);
      g.task.poses.push_back(fk(robot, BaseConfig(), q));
    }
    if (clear && task_feasible(robot, g, p)) return g;
  }
  throw InvalidInput("could not generate a collision-free task for robot '" + robot.name() + "'");
}

inline TaskPath gen_random_task(const RobotModel& robot, const GenParams& p, std::mt19937_64& rng) {
  return gen_random_task_with_joints(robot, p, rng).task;
}

enum class PathKind { kLine, kCircle, kCompound };

struct ParametricPath {
  PathKind kind = PathKind::kLine;
  // Line: start -> end. Circle: center, radius, unit normal of its plane,
  // start angle and sweep. Compound: line followed by a circle that starts
  // where the line ends and is tangent to it.
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3(0.2, 0.0, 0.0);
  Vec3 center = Vec3::Zero();
  double radius = 0.1;
  Vec3 normal = Vec3::UnitZ();
  double sweep = 2 * kPi;
  Vec3 orientation = Vec3(kPi, 0.0, 0.0);  // rotation vector held along the path
  bool tangent_orientation = false;        // circle: rotate with the tangent about the normal
};

namespace detail {

// Orthonormal basis (u, v) of the plane with the given unit normal.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = (a - n * n.dot(a)).normalized();
  return {u, n.cross(u)};
}

inline Pose6 circle_pose(const ParametricPath& p, const Vec3& u, const Vec3& v, const Vec3& n, double phi,
                         double phi0) {
  const Vec3 pos = p.center + p.radius * (std::cos(phi) * u + std::sin(phi) * v);
  if (!p.tangent_orientation) return Pose6(pos, p.orientation);
  const Mat3 r = so3_exp((phi - phi0) * n) * so3_exp(p.orientation);
  return Pose6(pos, so3_log(r));
}

}  // namespace detail

inline TaskPath gen_parametric_path(const ParametricPath& p, int t) {
  require(t >= 2, "a parametric path needs at least two poses");
  TaskPath out;
  const Vec3 n = p.normal.normalized();
  if (p.kind == PathKind::kLine) {
    require((p.end - p.start).norm() > 1e-12, "line has zero length");
    for (int i = 0; i < t; ++i) {
      const double s = static_cast<double>(i) / (t - 1);
      out.poses.emplace_back(p.start + s * (p.end - p.start), p.orientation);
    }
    return out;
  }
  require(p.radius > 1e-12, "circle has zero radius");
  require(std::abs(p.sweep) > 1e-12, "circle has zero sweep");
  require(p.normal.norm() > 1e-12, "circle normal is zero");
  if (p.kind == PathKind::kCircle) {
    const auto [u, v] = detail::plane_basis(n);
    for (int i = 0; i < t; ++i) {
      const double phi = p.sweep * i / (t - 1);
      out.poses.push_back(detail::circle_pose(p, u, v, n, phi, 0.0));
    }
    return out;
  }

  // Compound: the line ends where the circle starts, tangent to it. The
  // t - 1 intervals are split between the segments in proportion to their
  // lengths so the junction is itself one of the poses and spacing is
  // (nearly) uniform in arc length.
  const Vec3 dir = p.end - p.start;
  const double line_len = dir.norm();
  require(line_len > 1e-12, "line has zero length");
  require(t >= 3, "a compound path needs at least three poses");
  const Vec3 d = dir / line_len;
  require(std::abs(d.dot(n)) < 1e-9, "circle plane must contain the line direction");
  const double sign = p.sweep >= 0 ? 1.0 : -1.0;
  // Center in the plane, perpendicular to the line at its end, on the side
  // the circle turns toward.
  const Vec3 inward = sign * n.cross(d).normalized();
  ParametricPath circ = p;
  circ.center = p.end + p.radius * inward;
  const Vec3 u = (p.end - circ.center).normalized();
  const Vec3 v = sign * n.cross(u);  // v = d for either turning direction
  const double arc_len = p.radius * std::abs(p.sweep);
  const int intervals = t - 1;
  const int line_iv = std::clamp(static_cast<int>(std::lround(intervals * line_len / (line_len + arc_len))), 1,
                                 intervals - 1);
  for (int i = 0; i <= line_iv; ++i)
    out.poses.emplace_back(p.start + (static_cast<double>(i) / line_iv) * dir, p.orientation);
  const int arc_iv = intervals - line_iv;
  for (int i = 1; i <= arc_iv; ++i) {
    const double phi = std::abs(p.sweep) * i / arc_iv;
    const Vec3 pos = circ.center + p.radius * (std::cos(phi) * u + std::sin(phi) * v);
    if (p.tangent_orientation)
      out.poses.emplace_back(pos, so3_log(so3_exp(sign * phi * n) * so3_exp(p.orientation)));
    else
      out.poses.emplace_back(pos, p.orientation);
  }
  return out;
}

// Concatenates two paths; the first pose of b must coincide with the last of a
// and is stored once.
inline TaskPath concat_paths(const TaskPath& a, const TaskPath& b) {
  require(!a.poses.empty() && !b.poses.empty(), "cannot join empty paths");
  require(pose_error(a.poses.back(), b.poses.front()).norm() < 1e-9, "paths do not share their junction pose");
  TaskPath out = a;
  out.poses.insert(out.poses.end(), b.poses.begin() + 1, b.poses.end());
  return out;
}

}  // namespace bstar
