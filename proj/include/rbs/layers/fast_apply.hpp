#ifndef RBS_LAYERS_FAST_APPLY_HPP
#define RBS_LAYERS_FAST_APPLY_HPP

#include <memory>
#include <vector>

#include "rbs/layers/fast_summation.hpp"
#include "rbs/layers/layer_eval.hpp"
#include "rbs/layers/self_block.hpp"

namespace rbs::layers {

/// Near-zone correction for targets of one body close to another body:
/// values += matrix * density of the source body at the listed target nodes.
struct NearCorrection {
  int target_body = 0;
  int source_body = 0;
  std::vector<int> target_nodes;
  MatX matrix;
};

/// On-surface operator over all bodies for one kernel and one configuration:
/// self parts from rotated reference blocks, inter-body parts from the
/// summation provider, and near inter-body pairs corrected by upsampling.
class InteractionOperator {
 public:
  InteractionOperator(const std::vector<surface::ParticleSurface>& bodies, KernelTag tag, SelfBlockCache& cache,
                      std::shared_ptr<const FastSummation> provider, const NearOptions& opts = {});

  KernelTag tag() const { return tag_; }
  int components() const { return c_; }
  Eigen::Index size() const { return total_nodes_ * c_; }
  Eigen::Index offset(int body) const { return offsets_[body] * c_; }
  int body_size(int body) const { return node_counts_[body] * c_; }

  VecX apply(const VecX& density) const;
  VecX apply_self(const VecX& density) const;
  VecX apply_inter(const VecX& density) const;
  /// Self block of one body in its current orientation.
  VecX apply_self_body(int body, const VecX& density_body) const;

  const std::vector<NearCorrection>& near_corrections() const { return near_; }

 private:
  KernelTag tag_;
  int c_;
  std::vector<Mat3> rotations_;
  std::vector<std::shared_ptr<const SelfBlock>> blocks_;
  std::vector<int> node_counts_, offsets_;
  Eigen::Index total_nodes_ = 0;
  PointSet points_, normals_;
  VecX weights_;
  std::vector<int> groups_;
  std::shared_ptr<const FastSummation> provider_;
  std::vector<NearCorrection> near_;
};

VecX fast_apply(KernelTag tag, const std::vector<surface::ParticleSurface>& bodies, const VecX& density,
                SelfBlockCache& cache, std::shared_ptr<const FastSummation> provider = nullptr,
                const NearOptions& opts = {});

}  // namespace rbs::layers

#endif
