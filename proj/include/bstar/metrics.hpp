#pragma once

// Trajectory metrics shared by the solvers and the benchmark.

#include <cmath>
#include <vector>

#include "bstar/kinematics.hpp"

namespace bstar {

// RMS over all unordered pairs of the se(2) logarithm of T_i^-1 T_j.
inline double ate(const std::vector<BaseConfig>& bases) {
  const std::size_t t = bases.size();
  if (t < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const double c = std::cos(bases[i].theta), s = std::sin(bases[i].theta);
    for (std::size_t j = i + 1; j < t; ++j) {
      const double dx = bases[j].x - bases[i].x;
      const double dy = bases[j].y - bases[i].y;
      // Relative transform expressed in frame i.
      const Vec3 xi = se2_log(c * dx + s * dy, -s * dx + c * dy, bases[j].theta - bases[i].theta);
      sum += xi.squaredNorm();
    }
  }
  return std::sqrt(sum / static_cast<double>(t * (t - 1) / 2));
}

inline double path_length(const std::vector<JointConfig>& joints) {
  double len = 0.0;
  for (std::size_t i = 1; i < joints.size(); ++i) len += (joints[i] - joints[i - 1]).lpNorm<1>();
  return len;
}

}  // namespace bstar
