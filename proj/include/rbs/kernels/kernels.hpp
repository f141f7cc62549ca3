#ifndef RBS_KERNELS_KERNELS_HPP
#define RBS_KERNELS_KERNELS_HPP

#include <array>

#include "rbs/types.hpp"

// Free-space kernels for unit viscosity. All take r = x - y and throw
// SingularEvaluation when x and y coincide.
namespace rbs::kernels {

/// G_ij = (delta_ij / r + r_i r_j / r^3) / (8 pi).
Mat3 stokeslet(const Vec3& x, const Vec3& y);

/// T_ijk = -(3 / 4pi) r_i r_j r_k / r^5, stored as T[i](j, k).
using Tensor3 = std::array<Mat3, 3>;
Tensor3 traction_kernel(const Vec3& x, const Vec3& y);

/// The traction kernel contracted with the target normal:
/// K_ij = T_ijk n_k, so that the traction of a Stokeslet of strength f is K f.
Mat3 traction_matrix(const Vec3& x, const Vec3& y, const Vec3& nx);

struct StokesletDerivatives {
  double pressure = 0.0;
  /// grad(i, k) = d u_i / d x_k.
  Mat3 grad = Mat3::Zero();
};
StokesletDerivatives stokeslet_pressure_gradient(const Vec3& x, const Vec3& y, const Vec3& f);

/// (-p I + grad u + grad u^T) n.
Vec3 traction_from_gradient(const StokesletDerivatives& d, const Vec3& n);

struct LaplaceValues {
  double single_layer;
  /// Normal derivative at the target: d/dn(x) of 1 / (4 pi |x - y|).
  double adjoint_double_layer;
};
LaplaceValues laplace_kernels(const Vec3& x, const Vec3& y, const Vec3& nx);
double laplace_single(const Vec3& x, const Vec3& y);
/// Gradient with respect to x of 1 / (4 pi |x - y|).
Vec3 laplace_gradient(const Vec3& x, const Vec3& y);

}  // namespace rbs::kernels

#endif
