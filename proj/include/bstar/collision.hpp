#pragma once

// Signed distances between sphere/capsule primitives and against the ground
// plane z = 0, with first-order gradients for fixed witness points.

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <vector>

#include "bstar/kinematics.hpp"

namespace bstar {

inline constexpr int kGround = -1;

struct ContactResult {
  int geom_a = 0;
  int geom_b = kGround;  // geometry index or kGround
  double distance = 0.0;
  Vec3 witness_a = Vec3::Zero();  // closest core point (segment/center) on a, world frame
  Vec3 witness_b = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // unit vector from b toward a
  double radius_a = 0.0;
  double radius_b = 0.0;
  bool degenerate = false;  // witness points coincide; normal is arbitrary
};

namespace detail {

// World-frame core segment of a primitive; spheres have p0 == p1.
struct WorldSegment {
  Vec3 p0;
  Vec3 p1;
  double radius;
};

inline WorldSegment to_world(const CollisionGeom& g, const ChainFrames& f) {
  const Transform& t = g.link_index == kWorldLink ? Transform::Identity() : f.links[g.link_index];
  if (const auto* s = std::get_if<Sphere>(&g.shape)) {
    const Vec3 c = t * s->center;
    return {c, c, s->radius};
  }
  const auto& c = std::get<Capsule>(g.shape);
  return {t * c.p0, t * c.p1, c.radius};
}

// Closest points between segments [p1,q1] and [p2,q2] (Ericson, Real-Time
// Collision Detection, 5.1.9). Either segment may be a point.
inline std::pair<Vec3, Vec3> closest_points_segments(const Vec3& p1, const Vec3& q1,
                                                     const Vec3& p2, const Vec3& q2) {
  constexpr double eps = 1e-15;
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= eps && e <= eps) return {p1, p2};
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > eps * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return {p1 + d1 * s, p2 + d2 * t};
}

inline ContactResult pair_contact(const WorldSegment& a, const WorldSegment& b) {
  ContactResult c;
  auto [wa, wb] = closest_points_segments(a.p0, a.p1, b.p0, b.p1);
  c.witness_a = wa;
  c.witness_b = wb;
  c.radius_a = a.radius;
  c.radius_b = b.radius;
  const Vec3 d = wa - wb;
  const double len = d.norm();
  if (len < 1e-12) {
    c.degenerate = true;
    c.normal = Vec3::UnitZ();
  } else {
    c.normal = d / len;
  }
  c.distance = len - a.radius - b.radius;
  return c;
}

inline ContactResult ground_contact(const WorldSegment& a) {
  ContactResult c;
  if (std::abs(a.p0.z() - a.p1.z()) < 1e-12)
    c.witness_a = 0.5 * (a.p0 + a.p1);
  else
    c.witness_a = a.p0.z() < a.p1.z() ? a.p0 : a.p1;
  c.witness_b = Vec3(c.witness_a.x(), c.witness_a.y(), 0.0);
  c.normal = Vec3::UnitZ();
  c.radius_a = a.radius;
  c.distance = c.witness_a.z() - a.radius;
  return c;
}

}  // namespace detail

// Geometry pairs considered for self-collision.
inline std::vector<std::pair<int, int>> self_collision_pairs(const RobotModel& robot) {
  std::vector<std::pair<int, int>> pairs;
  const auto& geoms = robot.collision();
  const int ng = static_cast<int>(geoms.size());
  for (int i = 0; i < ng; ++i) {
    for (int j = i + 1; j < ng; ++j) {
      const int li = geoms[i].link_index;
      const int lj = geoms[j].link_index;
      if (li == kWorldLink && lj == kWorldLink) continue;
      // Adjacent links share a joint; world obstacles are never adjacent.
      if (li != kWorldLink && lj != kWorldLink && std::abs(li - lj) < 2) continue;
      const bool ignored = std::any_of(
          robot.ignore_pairs().begin(), robot.ignore_pairs().end(), [&](const auto& p) {
            return (p.first == i && p.second == j) || (p.first == j && p.second == i);
          });
      if (!ignored) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

inline std::vector<ContactResult> signed_distances(const RobotModel& robot, const ChainFrames& f,
                                                   bool include_ground) {
  const auto& geoms = robot.collision();
  std::vector<detail::WorldSegment> world;
  world.reserve(geoms.size());
  for (const auto& g : geoms) world.push_back(detail::to_world(g, f));

  std::vector<ContactResult> out;
  for (const auto& [i, j] : self_collision_pairs(robot)) {
    ContactResult c = detail::pair_contact(world[i], world[j]);
    c.geom_a = i;
    c.geom_b = j;
    out.push_back(c);
  }
  if (include_ground) {
    for (int i = 0; i < static_cast<int>(geoms.size()); ++i) {
      if (geoms[i].link_index == kWorldLink) continue;
      ContactResult c = detail::ground_contact(world[i]);
      c.geom_a = i;
      c.geom_b = kGround;
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<ContactResult> signed_distances(const RobotModel& robot, const BaseConfig& base,
                                                   const JointConfig& q, bool include_ground) {
  return signed_distances(robot, chain_frames(robot, base, q), include_ground);
}

inline double min_signed_distance(const RobotModel& robot, const BaseConfig& base,
                                  const JointConfig& q, bool include_ground = true) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : signed_distances(robot, base, q, include_ground)) d = std::min(d, c.distance);
  return d;
}

// Gradient of contact.distance w.r.t. [x_b, y_b, theta_b, q], witnesses held fixed.
inline Eigen::RowVectorXd sd_gradient(const RobotModel& robot, const ChainFrames& f,
                                      const ContactResult& contact) {
  if (contact.degenerate)
    throw DegenerateContact("contact normal undefined: witness points coincide");
  const auto& geoms = robot.collision();
  Eigen::MatrixXd ja =
      point_jacobian(robot, f, geoms.at(contact.geom_a).link_index, contact.witness_a);
  if (contact.geom_b != kGround)
    ja -= point_jacobian(robot, f, geoms.at(contact.geom_b).link_index, contact.witness_b);
  return contact.normal.transpose() * ja;
}

inline Eigen::RowVectorXd sd_gradient(const RobotModel& robot, const BaseConfig& base,
                                      const JointConfig& q, const ContactResult& contact) {
  return sd_gradient(robot, chain_frames(robot, base, q), contact);
}

}  // namespace bstar
