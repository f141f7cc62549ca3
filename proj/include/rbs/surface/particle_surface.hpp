#ifndef RBS_SURFACE_PARTICLE_SURFACE_HPP
#define RBS_SURFACE_PARTICLE_SURFACE_HPP

#include "rbs/surface/shape.hpp"
#include "rbs/types.hpp"

namespace rbs::surface {

struct Pose {
  Vec3 centroid = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Mat3 rotation() const { return orientation.toRotationMatrix(); }
};

/// A rigid body: shared reference shape plus pose, with world-frame samples.
/// World geometry is always the pose applied to the reference samples.
class ParticleSurface {
 public:
  ParticleSurface(ShapePtr shape, const Pose& pose);
  ParticleSurface(ShapePtr shape, const Vec3& centroid, const Quat& orientation = Quat::Identity())
      : ParticleSurface(std::move(shape), Pose{centroid, orientation}) {}

  void set_pose(const Pose& pose);

  const ShapePtr& shape() const { return shape_; }
  const Pose& pose() const { return pose_; }
  const Vec3& centroid() const { return pose_.centroid; }
  const Quat& orientation() const { return pose_.orientation; }
  const Mat3& rotation() const { return R_; }

  int degree() const { return shape_->degree(); }
  int node_count() const { return shape_->node_count(); }
  const SphericalGrid& grid() const { return shape_->grid(); }

  const PointSet& positions() const { return x_; }
  const PointSet& x_theta() const { return x_theta_; }
  const PointSet& x_phi() const { return x_phi_; }
  const PointSet& normals() const { return n_; }
  const VecX& area_element() const { return shape_->area_element(); }
  const VecX& weights() const { return shape_->weights(); }
  double area() const { return shape_->area(); }
  /// World-frame inertia R tau R^T about the centroid.
  const Mat3& inertia() const { return inertia_; }
  double max_spacing() const { return shape_->max_spacing(); }
  double bounding_radius() const { return shape_->bounding_radius(); }

 private:
  void update();

  ShapePtr shape_;
  Pose pose_;
  Mat3 R_;
  PointSet x_, x_theta_, x_phi_, n_;
  Mat3 inertia_;
};

/// Builds the world-frame samples of a shape for one pose.
ParticleSurface surface_geometry(ShapePtr shape, const Vec3& centroid, const Quat& orientation);

double surface_integral(const VecX& field, const ParticleSurface& s);
Vec3 surface_integral(const PointSet& field, const ParticleSurface& s);

struct BodyMoments {
  double area;
  Mat3 inertia;
};
/// Throws GeometryError if the inertia tensor is not positive definite.
BodyMoments body_moments(const ParticleSurface& s);

/// Tangential gradient of a scalar field by spectral differentiation.
PointSet surface_gradient(const VecX& field, const ParticleSurface& s);

/// Degree-p field samples resampled on the degree-p_target grid.
MatX upsample_field(const MatX& samples, const SphericalGrid& grid, int p_target);

}  // namespace rbs::surface

#endif
