#ifndef RBS_TEST_ORACLES_HPP
#define RBS_TEST_ORACLES_HPP

#include <cmath>
#include <functional>

#include "rbs/types.hpp"

namespace oracle {

using rbs::kPi;

/// Exterior velocity of a unit-radius sphere translating with velocity U in unit-viscosity fluid.
inline rbs::Vec3 translating_sphere(const rbs::Vec3& U, const rbs::Vec3& x, double a = 1.0) {
  const double r = x.norm();
  const rbs::Vec3 e = x / r;
  const rbs::Mat3 ee = e * e.transpose();
  const rbs::Mat3 I = rbs::Mat3::Identity();
  return (0.75 * (a / r) * (I + ee) + 0.25 * std::pow(a / r, 3) * (I - 3.0 * ee)) * U;
}

/// Composite Simpson rule with recursive refinement.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
  const auto simpson = [&](double l, double r) { return (r - l) / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r)); };
  const std::function<double(double, double, double, double, int)> rec = [&](double l, double r, double whole,
                                                                             double eps, int d) {
    const double m = 0.5 * (l + r);
    const double left = simpson(l, m), right = simpson(m, r);
    if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
    return rec(l, m, left, 0.5 * eps, d - 1) + rec(m, r, right, 0.5 * eps, d - 1);
  };
  return rec(a, b, simpson(a, b), tol, depth);
}

/// Area of the spheroid with semi-axis a along its symmetry axis and b across it.
inline double spheroid_area(double a, double b) {
  // Surface of revolution of (a cos t, b sin t): 2 pi int_0^pi b sin t sqrt(a^2 sin^2 t + b^2 cos^2 t) dt.
  return adaptive_simpson(
      [&](double t) {
        return 2.0 * kPi * b * std::sin(t) * std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t));
      },
      0.0, kPi, 1e-14);
}

/// Field of a point dipole m: H = (3 (m.e) e - m) / (4 pi r^3).
inline rbs::Vec3 dipole_field(const rbs::Vec3& m, const rbs::Vec3& x) {
  const double r = x.norm();
  const rbs::Vec3 e = x / r;
  return (3.0 * m.dot(e) * e - m) / (4.0 * kPi * r * r * r);
}

}  // namespace oracle

#endif
