#include "rbs/kernels/kernels.hpp"

#include "rbs/errors.hpp"

namespace rbs::kernels {

namespace {

Vec3 separation(const Vec3& x, const Vec3& y) {
  const Vec3 r = x - y;
  if (r.squaredNorm() == 0.0) throw SingularEvaluation("kernel evaluated at coincident points");
  return r;
}

constexpr double k8pi = 1.0 / (8.0 * kPi);
constexpr double k4pi = 1.0 / (4.0 * kPi);

}  // namespace

Mat3 stokeslet(const Vec3& x, const Vec3& y) {
  const Vec3 r = separation(x, y);
  const double d = r.norm();
  return k8pi * (Mat3::Identity() / d + r * r.transpose() / (d * d * d));
}

Tensor3 traction_kernel(const Vec3& x, const Vec3& y) {
  const Vec3 r = separation(x, y);
  const double d2 = r.squaredNorm();
  const double c = -3.0 * k4pi / (d2 * d2 * std::sqrt(d2));
  const Mat3 rr = r * r.transpose();
  Tensor3 T;
  for (int i = 0; i < 3; ++i) T[i] = c * r(i) * rr;
  return T;
}

Mat3 traction_matrix(const Vec3& x, const Vec3& y, const Vec3& nx) {
  const Vec3 r = separation(x, y);
  const double d2 = r.squaredNorm();
  const double c = -3.0 * k4pi * r.dot(nx) / (d2 * d2 * std::sqrt(d2));
  return c * r * r.transpose();
}

StokesletDerivatives stokeslet_pressure_gradient(const Vec3& x, const Vec3& y, const Vec3& f) {
  const Vec3 r = separation(x, y);
  const double d = r.norm();
  const double d3 = d * d * d;
  const double rf = r.dot(f);
  StokesletDerivatives out;
  out.pressure = k4pi * rf / d3;
  out.grad = k8pi * ((-f * r.transpose() + rf * Mat3::Identity() + r * f.transpose()) / d3 -
                     3.0 * rf * r * r.transpose() / (d3 * d * d));
  return out;
}

Vec3 traction_from_gradient(const StokesletDerivatives& d, const Vec3& n) {
  return -d.pressure * n + (d.grad + d.grad.transpose()) * n;
}

LaplaceValues laplace_kernels(const Vec3& x, const Vec3& y, const Vec3& nx) {
  const Vec3 r = separation(x, y);
  const double d = r.norm();
  return {k4pi / d, -k4pi * r.dot(nx) / (d * d * d)};
}

double laplace_single(const Vec3& x, const Vec3& y) { return k4pi / separation(x, y).norm(); }

Vec3 laplace_gradient(const Vec3& x, const Vec3& y) {
  const Vec3 r = separation(x, y);
  const double d = r.norm();
  return -k4pi * r / (d * d * d);
}

}  // namespace rbs::kernels
