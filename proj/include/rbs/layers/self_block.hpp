#ifndef RBS_LAYERS_SELF_BLOCK_HPP
#define RBS_LAYERS_SELF_BLOCK_HPP

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rbs/layers/layer_eval.hpp"
#include "rbs/surface/particle_surface.hpp"

namespace rbs::layers {

/// Dense on-surface operator of one body acting on its own nodal density.
/// Layout: (node, component) rows and columns, node-major.
struct SelfBlock {
  KernelTag tag = KernelTag::StokesSingle;
  int components = 3;
  MatX matrix;
  /// Orientation of the geometry the matrix was built for.
  Quat reference_orientation = Quat::Identity();

  /// matrix * density for a body in the reference orientation.
  VecX apply(const VecX& density) const;
  /// R B (R^T density) with R the rotation relative to the reference.
  VecX apply_rotated(const VecX& density, const Mat3& R) const;
};

/// Pole-rotation quadrature for all targets of the body, in its world frame.
SelfBlock singular_self_matrix(const surface::ParticleSurface& s, KernelTag tag);
/// Several kernels at once; the rotated resampling is shared between them.
std::vector<SelfBlock> singular_self_matrices(const surface::ParticleSurface& s, const std::vector<KernelTag>& tags);
/// Same, for the shape in its reference frame.
std::vector<SelfBlock> reference_self_matrices(const surface::ShapeModel& shape, const std::vector<KernelTag>& tags);

/// Conjugation by the block-diagonal rotation; no requadrature.
/// Throws InvalidRotation if R is not orthogonal.
SelfBlock rotate_self_matrix(const SelfBlock& block, const Mat3& R);

void check_rotation(const Mat3& R);

/// Reference-frame blocks shared by all bodies with the same shape. Stokes
/// single/traction and Laplace single/adjoint pairs are built together.
class SelfBlockCache {
 public:
  std::shared_ptr<const SelfBlock> get(const surface::ShapePtr& shape, KernelTag tag);
  size_t size() const;

 private:
  using Key = std::pair<const surface::ShapeModel*, KernelTag>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const SelfBlock>> blocks_;
  std::vector<surface::ShapePtr> keep_alive_;
};

}  // namespace rbs::layers

#endif
