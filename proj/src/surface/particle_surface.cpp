#include "rbs/surface/particle_surface.hpp"

#include <cmath>

#include "rbs/errors.hpp"

namespace rbs::surface {

ParticleSurface::ParticleSurface(ShapePtr shape, const Pose& pose) : shape_(std::move(shape)) {
  if (!shape_) throw InvalidArgument("particle surface needs a shape");
  set_pose(pose);
}

void ParticleSurface::set_pose(const Pose& pose) {
  const double norm = pose.orientation.norm();
  if (!(norm > 1e-12) || !std::isfinite(norm)) throw InvalidRotation("orientation quaternion has zero norm");
  pose_.centroid = pose.centroid;
  pose_.orientation = pose.orientation.normalized();
  update();
}

void ParticleSurface::update() {
  R_ = pose_.rotation();
  const Eigen::RowVector3d c = pose_.centroid.transpose();
  x_ = (shape_->positions() * R_.transpose()).rowwise() + c;
  x_theta_ = shape_->x_theta() * R_.transpose();
  x_phi_ = shape_->x_phi() * R_.transpose();
  n_ = shape_->normals() * R_.transpose();
  inertia_ = R_ * shape_->inertia() * R_.transpose();
}

ParticleSurface surface_geometry(ShapePtr shape, const Vec3& centroid, const Quat& orientation) {
  return ParticleSurface(std::move(shape), Pose{centroid, orientation});
}

double surface_integral(const VecX& field, const ParticleSurface& s) {
  if (field.size() != s.node_count()) throw InvalidArgument("field size does not match the surface grid");
  return s.weights().dot(field);
}

Vec3 surface_integral(const PointSet& field, const ParticleSurface& s) {
  if (field.rows() != s.node_count()) throw InvalidArgument("field size does not match the surface grid");
  return (s.weights().transpose() * field).transpose();
}

BodyMoments body_moments(const ParticleSurface& s) {
  const PointSet& x = s.positions();
  Mat3 tau = Mat3::Zero();
  for (int i = 0; i < s.node_count(); ++i) {
    const Vec3 r = x.row(i).transpose() - s.centroid();
    tau += s.weights()(i) * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
  }
  tau = 0.5 * (tau + tau.transpose());
  Eigen::LLT<Mat3> llt(tau);
  if (llt.info() != Eigen::Success) throw GeometryError("body inertia tensor is not positive definite");
  return {s.weights().sum(), tau};
}

PointSet surface_gradient(const VecX& field, const ParticleSurface& s) {
  if (field.size() != s.node_count()) throw InvalidArgument("field size does not match the surface grid");
  const ShapeModel& shape = *s.shape();
  const VecX coeffs = shape.analysis() * field;
  const VecX ft = shape.nodal_synthesis().dtheta * coeffs;
  const VecX fps = shape.nodal_synthesis().dphi_over_sin * coeffs;
  const SphericalGrid& grid = s.grid();
  PointSet g(s.node_count(), 3);
  for (int j = 0; j < grid.n_theta(); ++j) {
    const double sn = std::sin(grid.theta(j));
    for (int k = 0; k < grid.n_phi(); ++k) {
      const int i = grid.index(j, k);
      const Vec3 a = s.x_theta().row(i).transpose();
      const Vec3 b = s.x_phi().row(i).transpose() / sn;
      const double E = a.dot(a), F = a.dot(b), G = b.dot(b);
      const double det = E * G - F * F;
      g.row(i) = (((G * ft(i) - F * fps(i)) * a + (E * fps(i) - F * ft(i)) * b) / det).transpose();
    }
  }
  return g;
}

MatX upsample_field(const MatX& samples, const SphericalGrid& grid, int p_target) {
  return upsample(samples, grid, p_target);
}

}  // namespace rbs::surface
