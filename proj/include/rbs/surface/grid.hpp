#ifndef RBS_SURFACE_GRID_HPP
#define RBS_SURFACE_GRID_HPP

#include <vector>

#include "rbs/surface/legendre.hpp"
#include "rbs/types.hpp"

namespace rbs::surface {

/// Tensor grid for degree-p expansions: p+1 Gauss-Legendre polar nodes times
/// 2p+2 equispaced azimuthal nodes. Node index = j * (2p+2) + k, polar angle
/// increasing with j.
class SphericalGrid {
 public:
  explicit SphericalGrid(int p);

  int degree() const { return p_; }
  int n_theta() const { return p_ + 1; }
  int n_phi() const { return 2 * p_ + 2; }
  int size() const { return n_theta() * n_phi(); }
  int index(int j, int k) const { return j * n_phi() + k; }

  double theta(int j) const { return theta_[j]; }
  double phi(int k) const { return phi_[k]; }
  /// cos(theta_j), the Gauss-Legendre node.
  double gl_node(int j) const { return t_[j]; }
  double gl_weight(int j) const { return lambda_[j]; }
  /// w_j = 2 pi lambda_j / ((2p+2) sin theta_j); integrates f W dtheta dphi.
  double quad_weight(int j) const { return w_[j]; }
  /// 2 pi lambda_j / (2p+2); integrates f over the unit sphere in dS.
  double sphere_weight(int j) const { return w_[j] * std::sin(theta_[j]); }

  Vec3 unit_point(int node) const;
  const LegendreValues& legendre(int j) const { return legendre_[j]; }

  const std::vector<double>& thetas() const { return theta_; }
  const std::vector<double>& phis() const { return phi_; }

 private:
  int p_;
  std::vector<double> theta_, phi_, t_, lambda_, w_;
  std::vector<LegendreValues> legendre_;
};

SphericalGrid build_grid(int p);

}  // namespace rbs::surface

#endif
