#ifndef RBS_LAYERS_KERNEL_BLOCK_HPP
#define RBS_LAYERS_KERNEL_BLOCK_HPP

#include <cmath>

#include "rbs/layers/layer_eval.hpp"

namespace rbs::layers::detail {

/// Kernel matrix for one target/source pair; only the leading
/// value_components x density_components corner is meaningful.
inline Mat3 kernel_block(KernelTag tag, const Vec3& x, const Vec3& nx, const Vec3& y) {
  const Vec3 r = x - y;
  const double d2 = r.squaredNorm();
  const double d = std::sqrt(d2);
  const double c4 = 1.0 / (4.0 * kPi);
  Mat3 k;
  switch (tag) {
    case KernelTag::StokesSingle:
      k = (0.5 * c4) * (Mat3::Identity() / d + r * r.transpose() / (d2 * d));
      break;
    case KernelTag::StokesTraction:
      k = (-3.0 * c4 * r.dot(nx) / (d2 * d2 * d)) * (r * r.transpose());
      break;
    case KernelTag::LaplaceSingle:
      k.setZero();
      k(0, 0) = c4 / d;
      break;
    case KernelTag::LaplaceAdjointDouble:
      k.setZero();
      k(0, 0) = -c4 * r.dot(nx) / (d2 * d);
      break;
    case KernelTag::LaplaceGradient:
      k.setZero();
      k.col(0) = -c4 * r / (d2 * d);
      break;
  }
  return k;
}

}  // namespace rbs::layers::detail

#endif
