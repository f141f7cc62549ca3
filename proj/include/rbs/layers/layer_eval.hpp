#ifndef RBS_LAYERS_LAYER_EVAL_HPP
#define RBS_LAYERS_LAYER_EVAL_HPP

#include <string>

#include "rbs/surface/particle_surface.hpp"
#include "rbs/types.hpp"

namespace rbs::layers {

enum class KernelTag {
  StokesSingle,          ///< S[mu] = int G mu dS
  StokesTraction,        ///< K[mu] = int T(x, y) n(x) mu dS
  LaplaceSingle,         ///< S^L[q] = int q / (4 pi r) dS
  LaplaceAdjointDouble,  ///< K^L[q] = n(x) . grad S^L[q]
  LaplaceGradient,       ///< grad S^L[q], off-surface only
};

std::string to_string(KernelTag tag);
int density_components(KernelTag tag);
int value_components(KernelTag tag);
/// Traction-type kernels contract with a normal at the target.
bool needs_target_normals(KernelTag tag);

struct NearOptions {
  /// A target is near a surface when its distance to the closest node is
  /// below near_factor * h, h being the largest node spacing of that surface.
  double near_factor = 1.25;
  /// Upsampling factor kappa: near targets use the degree kappa * p rule.
  int upsample = 4;
};

/// Defaults for fields evaluated at points off the surfaces, where the
/// smooth rule is only trusted beyond five node spacings.
inline NearOptions field_evaluation_options() {
  NearOptions o;
  o.near_factor = 5.0;
  return o;
}

double near_threshold(const surface::ParticleSurface& s, const NearOptions& opts = {});
double min_node_distance(const surface::ParticleSurface& s, const Vec3& x);
/// Distance to the closest surface point, negative inside; meant for points near the surface.
double signed_distance(const surface::ParticleSurface& s, const Vec3& x);
bool in_near_zone(const surface::ParticleSurface& s, const Vec3& x, const NearOptions& opts = {});

/// Gauss solid-angle integral over 4 pi: about 1 inside, 0 outside, 1/2 on the surface.
double winding_number(const surface::ParticleSurface& s, const Vec3& x, int p_eval = 0);
bool is_inside_or_on(const surface::ParticleSurface& s, const Vec3& x, int p_eval = 0);

/// The same body on the degree-p_target grid of its shape.
surface::ParticleSurface upsampled_surface(const surface::ParticleSurface& s, int p_target);

/// density: node_count x density_components(tag). Returns targets x value_components(tag).
/// Throws NearZoneViolation for targets in the near zone.
MatX smooth_layer_eval(KernelTag tag, const surface::ParticleSurface& s, const MatX& density,
                       const PointSet& targets, const PointSet* target_normals = nullptr,
                       const NearOptions& opts = {});

/// Upsampled rule for targets close to (but outside) the surface; kappa = 1
/// is the plain smooth rule. Targets on or inside the surface throw DomainError.
MatX near_eval(KernelTag tag, const surface::ParticleSurface& s, const MatX& density, const PointSet& targets,
               const PointSet* target_normals = nullptr, int kappa = 4);

/// Routes each target to the smooth or near rule.
MatX evaluate_layer(KernelTag tag, const surface::ParticleSurface& s, const MatX& density,
                    const PointSet& targets, const PointSet* target_normals = nullptr,
                    const NearOptions& opts = {});

/// Same routing for targets enclosed by s; near targets outside s throw DomainError.
MatX evaluate_layer_inside(KernelTag tag, const surface::ParticleSurface& s, const MatX& density,
                           const PointSet& targets, const PointSet* target_normals = nullptr,
                           const NearOptions& opts = {});

/// Linear map from nodal density (node-major, component-minor) to target
/// values (target-major, component-minor) of the kappa-upsampled rule.
MatX layer_matrix(KernelTag tag, const surface::ParticleSurface& s, const PointSet& targets,
                  const PointSet* target_normals, int kappa);

}  // namespace rbs::layers

#endif
