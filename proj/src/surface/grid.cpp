#include "rbs/surface/grid.hpp"

#include <cmath>
#include <string>

#include "rbs/errors.hpp"

namespace rbs::surface {

SphericalGrid::SphericalGrid(int p) : p_(p) {
  if (p < 1) throw InvalidArgument("spherical grid degree must be >= 1, got " + std::to_string(p));
  gauss_legendre(p + 1, t_, lambda_);
  theta_.resize(p + 1);
  w_.resize(p + 1);
  legendre_.resize(p + 1);
  for (int j = 0; j <= p; ++j) {
    theta_[j] = std::acos(t_[j]);
    w_[j] = 2.0 * kPi * lambda_[j] / ((2.0 * p + 2.0) * std::sin(theta_[j]));
    normalized_legendre(p, theta_[j], legendre_[j]);
  }
  phi_.resize(2 * p + 2);
  for (int k = 0; k < 2 * p + 2; ++k) phi_[k] = 2.0 * kPi * k / (2.0 * p + 2.0);
}

Vec3 SphericalGrid::unit_point(int node) const {
  const int j = node / n_phi();
  const int k = node % n_phi();
  const double s = std::sin(theta_[j]);
  return {s * std::cos(phi_[k]), s * std::sin(phi_[k]), std::cos(theta_[j])};
}

SphericalGrid build_grid(int p) { return SphericalGrid(p); }

}  // namespace rbs::surface
