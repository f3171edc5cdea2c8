#pragma once

// Shared helpers for the test suites.

#include <random>

#include "bstar/kinematics.hpp"

namespace bstar::testing {

// Single revolute joint about z at the origin with a 1 m link along local x.
inline RobotModel one_r_planar(std::vector<CollisionGeom> geoms = {}) {
  JointSpec j;
  j.axis = Vec3::UnitZ();
  j.lo = -kPi;
  j.hi = kPi;
  return RobotModel("one_r", {j}, std::move(geoms), Transform::Identity(),
                    make_transform(Vec3(1.0, 0.0, 0.0), Vec3::Zero()));
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

// Random serial chain with `dof` joints; every third joint is prismatic when
// `with_prismatic` is set.
inline RobotModel random_robot(std::mt19937_64& rng, int dof, bool with_prismatic = false) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<JointSpec> joints;
  for (int k = 0; k < dof; ++k) {
    JointSpec j;
    j.parent_offset = make_transform(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng) * 4, u(rng) * 4, u(rng) * 4));
    j.axis = random_unit(rng);
    if (with_prismatic && k % 3 == 2) {
      j.kind = JointKind::kPrismatic;
      j.lo = -0.3;
      j.hi = 0.3;
    } else {
      j.lo = -2.5;
      j.hi = 2.5;
    }
    joints.push_back(j);
  }
  return RobotModel("random", joints, {}, make_transform(Vec3(0, 0, 0.2), Vec3(0.1, -0.2, 0.3)),
                    make_transform(Vec3(0.1, 0.05, 0.0), Vec3::Zero()));
}

inline JointConfig random_config(std::mt19937_64& rng, const RobotModel& r) {
  JointConfig q(r.dof());
  for (int k = 0; k < r.dof(); ++k) {
    std::uniform_real_distribution<double> u(r.joints()[k].lo, r.joints()[k].hi);
    q[k] = u(rng);
  }
  return q;
}

inline BaseConfig random_base(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return BaseConfig(u(rng), u(rng), u(rng) * kPi);
}

}  // namespace bstar::testing
