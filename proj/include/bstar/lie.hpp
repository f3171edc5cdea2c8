#pragma once

// Small Lie-group helpers for SO(3), SE(3) and SE(2).

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

namespace bstar {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Transform = Eigen::Isometry3d;

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Rotation vector -> rotation matrix.
inline Mat3 so3_exp(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle < 1e-12) return Mat3::Identity() + hat(rv);
  return Eigen::AngleAxisd(angle, rv / angle).toRotationMatrix();
}

// Rotation matrix -> rotation vector with norm in [0, pi].
inline Vec3 so3_log(const Mat3& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-300) return Vec3::Zero();
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

// Brings a rotation vector into the canonical ball ||rv|| <= pi.
inline Vec3 canonical_rotvec(const Vec3& rv) {
  if (rv.norm() <= kPi) return rv;
  return so3_log(so3_exp(rv));
}

// Inverse of the right Jacobian of SO(3): log(R exp(dv)) ~ log(R) + Jr^{-1}(log R) dv.
inline Mat3 so3_right_jacobian_inv(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = hat(phi);
  if (theta < 1e-6) return Mat3::Identity() + 0.5 * k + (1.0 / 12.0) * k * k;
  const double coef =
      1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * k + coef * k * k;
}

inline Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

inline Transform make_transform(const Vec3& xyz, const Vec3& rpy) {
  Transform t = Transform::Identity();
  t.linear() = rpy_to_matrix(rpy);
  t.translation() = xyz;
  return t;
}

// se(2) logarithm of the planar rigid transform (x, y, theta); returns (rho_x, rho_y, theta).
inline Vec3 se2_log(double x, double y, double theta) {
  const double th = wrap_angle(theta);
  double a, b;  // V^{-1} = [[a, b], [-b, a]]
  if (std::abs(th) < 1e-9) {
    a = 1.0 - th * th / 12.0;
    b = th / 2.0;
  } else {
    a = th * std::sin(th) / (2.0 * (1.0 - std::cos(th)));
    b = th / 2.0;
  }
  return {a * x + b * y, -b * x + a * y, th};
}

}  // namespace bstar
