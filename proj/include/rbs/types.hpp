#ifndef RBS_TYPES_HPP
#define RBS_TYPES_HPP

#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace rbs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// One point (or one 3-vector sample) per row; the flat storage is node-major,
/// component-minor, which is the layout used by every solver vector.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;

inline Mat3 cross_matrix(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

}  // namespace rbs

#endif
