#include "rbs/dynamics/rotation.hpp"

#include <cmath>

namespace rbs::dynamics {

Quat exp_map(const Vec3& theta) {
  const double angle = theta.norm();
  if (angle == 0.0) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, theta / angle));
}

Mat3 rodrigues(const Vec3& theta) {
  const double angle = theta.norm();
  if (angle == 0.0) return Mat3::Identity();
  const Mat3 K = cross_matrix(theta / angle);
  return Mat3::Identity() + std::sin(angle) * K + (1.0 - std::cos(angle)) * K * K;
}

Quat rotation_step(const Quat& q, const Vec3& omega, double dt) { return (exp_map(omega * dt) * q).normalized(); }

Vec3 dexpinv(const Vec3& theta, const Vec3& w) {
  const Vec3 tw = theta.cross(w);
  return w - 0.5 * tw + theta.cross(tw) / 12.0;
}

double orthogonality_error(const Mat3& R) { return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff(); }

}  // namespace rbs::dynamics
