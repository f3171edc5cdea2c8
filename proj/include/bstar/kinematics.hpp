#pragma once

// Serial-chain robot model, forward kinematics and Jacobians.
//
// The chain is mounted on a planar base (x, y, theta) embedded in SE(3) as the
// translation (x, y, 0) plus a yaw about world z. Frames follow the URDF idiom:
//
//   T_link[0]  = T_base * T_mount
//   T_link[k]  = T_link[k-1] * T_offset[k] * motion_k(q_k)      k = 1..n
//   T_ee       = T_link[n] * T_tool
//
// Jacobian columns are ordered [x_b, y_b, theta_b, q_1..q_n]; rows are
// [linear velocity; world angular velocity].

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bstar/errors.hpp"
#include "bstar/lie.hpp"

namespace bstar {

using JointConfig = Eigen::VectorXd;

enum class JointKind { kRevolute, kPrismatic };

struct JointSpec {
  Transform parent_offset = Transform::Identity();
  Vec3 axis = Vec3::UnitZ();
  JointKind kind = JointKind::kRevolute;
  double lo = -kPi;
  double hi = kPi;
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct Capsule {
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
  double radius = 0.0;
};

// Link index 0 is the mount frame, k in [1, n] the frame after joint k and
// kWorldLink a geometry fixed in the world.
inline constexpr int kWorldLink = -1;

struct CollisionGeom {
  int link_index = 0;
  std::variant<Sphere, Capsule> shape;
};

class RobotModel {
 public:
  RobotModel() = default;
  RobotModel(std::string name, std::vector<JointSpec> joints,
             std::vector<CollisionGeom> collision = {},
             Transform mount = Transform::Identity(), Transform tool = Transform::Identity(),
             std::vector<std::pair<int, int>> ignore_pairs = {})
      : name_(std::move(name)),
        joints_(std::move(joints)),
        collision_(std::move(collision)),
        mount_(mount),
        tool_(tool),
        ignore_pairs_(std::move(ignore_pairs)) {
    validate();
  }

  const std::string& name() const { return name_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<CollisionGeom>& collision() const { return collision_; }
  const Transform& mount() const { return mount_; }
  const Transform& tool() const { return tool_; }
  // Geometry index pairs excluded from self-collision on top of the adjacency rule.
  const std::vector<std::pair<int, int>>& ignore_pairs() const { return ignore_pairs_; }
  int dof() const { return static_cast<int>(joints_.size()); }

  Eigen::VectorXd lower() const {
    Eigen::VectorXd v(dof());
    for (int i = 0; i < dof(); ++i) v[i] = joints_[i].lo;
    return v;
  }
  Eigen::VectorXd upper() const {
    Eigen::VectorXd v(dof());
    for (int i = 0; i < dof(); ++i) v[i] = joints_[i].hi;
    return v;
  }

  // Upper bound on the distance between the mount origin and the end-effector.
  double reach() const {
    double r = tool_.translation().norm();
    for (const auto& j : joints_) {
      r += j.parent_offset.translation().norm();
      if (j.kind == JointKind::kPrismatic) r += std::max(std::abs(j.lo), std::abs(j.hi));
    }
    return r;
  }

 private:
  void validate() const {
    require(!joints_.empty(), "robot '" + name_ + "' has no joints");
    for (std::size_t i = 0; i < joints_.size(); ++i) {
      const auto& j = joints_[i];
      require(j.lo < j.hi, "joint " + std::to_string(i) + " has lo >= hi");
      require(std::abs(j.axis.norm() - 1.0) <= 1e-9,
              "joint " + std::to_string(i) + " axis is not a unit vector");
    }
    for (const auto& g : collision_) {
      require(g.link_index >= kWorldLink && g.link_index <= dof(),
              "collision geometry attached to unknown link");
      if (const auto* s = std::get_if<Sphere>(&g.shape)) {
        require(s->radius > 0.0, "sphere radius must be positive");
      } else {
        const auto& c = std::get<Capsule>(g.shape);
        require(c.radius > 0.0, "capsule radius must be positive");
        require((c.p1 - c.p0).norm() > 0.0, "capsule endpoints coincide");
      }
    }
    const int ng = static_cast<int>(collision_.size());
    for (const auto& [a, b] : ignore_pairs_)
      require(a >= 0 && a < ng && b >= 0 && b < ng, "ignore pair references unknown geometry");
  }

  std::string name_;
  std::vector<JointSpec> joints_;
  std::vector<CollisionGeom> collision_;
  Transform mount_ = Transform::Identity();
  Transform tool_ = Transform::Identity();
  std::vector<std::pair<int, int>> ignore_pairs_;
};

// Planar base pose; theta is kept in (-pi, pi].
struct BaseConfig {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  BaseConfig() = default;
  BaseConfig(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Eigen::Vector3d vec() const { return {x, y, theta}; }

  Transform transform() const {
    Transform t = Transform::Identity();
    t.linear() = Eigen::AngleAxisd(theta, Vec3::UnitZ()).toRotationMatrix();
    t.translation() = Vec3(x, y, 0.0);
    return t;
  }

  bool operator==(const BaseConfig&) const = default;
};

// End-effector pose as position plus canonical rotation vector.
struct Pose6 {
  Vec3 position = Vec3::Zero();
  Vec3 orientation = Vec3::Zero();

  Pose6() = default;
  Pose6(const Vec3& p, const Vec3& rv) : position(p), orientation(canonical_rotvec(rv)) {}

  static Pose6 from_transform(const Transform& t) {
    Pose6 p;
    p.position = t.translation();
    p.orientation = so3_log(t.linear());
    return p;
  }

  Mat3 rotation() const { return so3_exp(orientation); }

  Transform transform() const {
    Transform t = Transform::Identity();
    t.linear() = rotation();
    t.translation() = position;
    return t;
  }
};

struct TaskPath {
  std::vector<Pose6> poses;

  std::size_t size() const { return poses.size(); }
};

// All frames of the chain for one configuration.
struct ChainFrames {
  Transform base;
  std::vector<Transform> links;  // links[0] = mount frame, links[k] = after joint k
  std::vector<Vec3> axes;        // world joint axes, index k-1 for joint k
  std::vector<Vec3> origins;     // world joint origins
  Transform ee;
};

inline void check_dims(const RobotModel& robot, const JointConfig& q) {
  if (q.size() != robot.dof())
    throw InvalidInput("joint vector has " + std::to_string(q.size()) + " entries, robot '" +
                       robot.name() + "' has " + std::to_string(robot.dof()) + " joints");
}

inline ChainFrames chain_frames(const RobotModel& robot, const BaseConfig& base,
                                const JointConfig& q) {
  check_dims(robot, q);
  const int n = robot.dof();
  ChainFrames f;
  f.base = base.transform();
  f.links.reserve(n + 1);
  f.axes.reserve(n);
  f.origins.reserve(n);
  f.links.push_back(f.base * robot.mount());
  for (int k = 0; k < n; ++k) {
    const auto& j = robot.joints()[k];
    const Transform pre = f.links.back() * j.parent_offset;
    f.axes.push_back(pre.linear() * j.axis);
    f.origins.push_back(pre.translation());
    Transform motion = Transform::Identity();
    if (j.kind == JointKind::kRevolute)
      motion.linear() = Eigen::AngleAxisd(q[k], j.axis).toRotationMatrix();
    else
      motion.translation() = j.axis * q[k];
    f.links.push_back(pre * motion);
  }
  f.ee = f.links.back() * robot.tool();
  return f;
}

inline Pose6 fk(const RobotModel& robot, const BaseConfig& base, const JointConfig& q) {
  return Pose6::from_transform(chain_frames(robot, base, q).ee);
}

// 3 x (3+n) Jacobian of a world point rigidly attached to link `link_index`.
inline Eigen::MatrixXd point_jacobian(const RobotModel& robot, const ChainFrames& f,
                                      int link_index, const Vec3& p) {
  const int n = robot.dof();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, 3 + n);
  if (link_index == kWorldLink) return jac;
  const Vec3 base_origin = f.base.translation();
  jac(0, 0) = 1.0;
  jac(1, 1) = 1.0;
  jac.col(2) = Vec3::UnitZ().cross(p - base_origin);
  for (int k = 0; k < link_index; ++k) {
    if (robot.joints()[k].kind == JointKind::kRevolute)
      jac.col(3 + k) = f.axes[k].cross(p - f.origins[k]);
    else
      jac.col(3 + k) = f.axes[k];
  }
  return jac;
}

// Geometric end-effector Jacobian, 6 x (3+n).
inline Eigen::MatrixXd jacobian(const RobotModel& robot, const ChainFrames& f) {
  const int n = robot.dof();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, 3 + n);
  const Vec3 p = f.ee.translation();
  jac.topRows(3) = point_jacobian(robot, f, n, p);
  jac(5, 2) = 1.0;
  for (int k = 0; k < n; ++k)
    if (robot.joints()[k].kind == JointKind::kRevolute) jac.block<3, 1>(3, 3 + k) = f.axes[k];
  return jac;
}

inline Eigen::MatrixXd jacobian(const RobotModel& robot, const BaseConfig& base,
                                const JointConfig& q) {
  return jacobian(robot, chain_frames(robot, base, q));
}

// [actual.position - target.position; log(R_target^T R_actual)].
inline Vec6 pose_error(const Pose6& actual, const Pose6& target) {
  Vec6 e;
  e.head<3>() = actual.position - target.position;
  e.tail<3>() = so3_log(target.rotation().transpose() * actual.rotation());
  return e;
}

// Jacobian of pose_error(fk(.), target) given the geometric Jacobian at `actual`.
inline Eigen::MatrixXd pose_error_jacobian(const Pose6& actual, const Pose6& target,
                                           const Eigen::MatrixXd& geometric) {
  const Mat3 r_actual = actual.rotation();
  const Vec3 e_rot = so3_log(target.rotation().transpose() * r_actual);
  Eigen::MatrixXd jac = geometric;
  jac.bottomRows(3) = so3_right_jacobian_inv(e_rot) * r_actual.transpose() * geometric.bottomRows(3);
  return jac;
}

}  // namespace bstar
