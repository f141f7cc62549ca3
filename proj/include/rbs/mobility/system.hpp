#ifndef RBS_MOBILITY_SYSTEM_HPP
#define RBS_MOBILITY_SYSTEM_HPP

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rbs/layers/fast_apply.hpp"
#include "rbs/surface/particle_surface.hpp"

// Vectors over a configuration are body-major, then node, then component.
namespace rbs::mobility {

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 100;
  bool preconditioner = true;
  bool dense_debug = false;
  layers::NearOptions near;
};

/// Caches that outlive one configuration: reference self blocks and
/// reference preconditioner factorizations per shape, plus the summation
/// provider.
class MobilityContext {
 public:
  explicit MobilityContext(std::shared_ptr<const layers::FastSummation> provider = nullptr);

  layers::SelfBlockCache& blocks() { return blocks_; }
  const std::shared_ptr<const layers::FastSummation>& provider() const { return provider_; }
  /// LU of (1/2 I + K + L) for the shape in its reference frame.
  std::shared_ptr<const Eigen::PartialPivLU<MatX>> stokes_factor(const surface::ShapePtr& shape);
  /// LU of (1/2 I + eta K^L) for the shape.
  std::shared_ptr<const Eigen::PartialPivLU<MatX>> laplace_factor(const surface::ShapePtr& shape, double eta);

 private:
  std::shared_ptr<const layers::FastSummation> provider_;
  layers::SelfBlockCache blocks_;
  std::mutex mutex_;
  std::vector<surface::ShapePtr> keep_alive_;
  std::map<const surface::ShapeModel*, std::shared_ptr<const Eigen::PartialPivLU<MatX>>> stokes_;
  std::map<std::pair<const surface::ShapeModel*, double>, std::shared_ptr<const Eigen::PartialPivLU<MatX>>> laplace_;
};

/// rho(x) = F / |Gamma| + (tau^-1 T) x (x - x^c).
PointSet incident_density(const Vec3& F, const Vec3& T, const surface::ParticleSurface& s);

struct Moments {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};
/// Net force and torque (about the centroid) of a density on one body.
Moments apply_G(const PointSet& mu, const surface::ParticleSurface& s);
/// L_i[mu](x) = int mu dS + (int (y - x^c) x mu dS) x (x - x^c).
PointSet apply_L(const PointSet& mu, const surface::ParticleSurface& s);
VecX apply_L(const VecX& mu, const std::vector<surface::ParticleSurface>& bodies);
/// Dense matrix of L_i in the body's frame.
MatX L_matrix(const surface::ParticleSurface& s);

// Subtracts from each body's field the rigid density carrying the same force and torque.
VecX remove_moments(const VecX& f, const std::vector<surface::ParticleSurface>& bodies);
// Same projection applied to the rows of a dense one-body operator.
MatX remove_moments(const MatX& A, const surface::ParticleSurface& s);

struct RigidVelocity {
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};
RigidVelocity extract_rigid_velocity(const PointSet& u, const surface::ParticleSurface& s);

/// Views of one body's segment of a configuration vector.
Eigen::Map<const PointSet> body_field(const VecX& v, const std::vector<surface::ParticleSurface>& bodies, int body);
VecX stack_fields(const std::vector<PointSet>& fields);
std::vector<Eigen::Index> body_offsets(const std::vector<surface::ParticleSurface>& bodies);

/// The constrained second-kind system for one configuration.
class MobilitySystem {
 public:
  MobilitySystem(const std::vector<surface::ParticleSurface>& bodies, MobilityContext& ctx,
                 const SolverOptions& opts = {});

  Eigen::Index size() const { return size_; }
  const std::vector<surface::ParticleSurface>& bodies() const { return bodies_; }

  /// (1/2 I + K + L) mu.
  VecX apply_system(const VecX& mu) const;
  /// -(1/2 I + K) rho.
  VecX rhs(const VecX& rho) const;
  VecX apply_half_plus_K(const VecX& mu) const;
  VecX apply_L(const VecX& mu) const;
  /// Block-diagonal inverse, or identity when preconditioning is off.
  VecX precondition(const VecX& r) const;
  /// S[density] on all surfaces.
  VecX single_layer(const VecX& density) const;

  const layers::InteractionOperator& traction_operator() const { return traction_; }
  const layers::InteractionOperator& single_layer_operator() const { return single_; }

  /// Throws ConsistencyError if `bodies` are not the poses this system was built for.
  void check_poses(const std::vector<surface::ParticleSurface>& bodies) const;

 private:
  std::vector<surface::ParticleSurface> bodies_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index size_ = 0;
  SolverOptions opts_;
  layers::InteractionOperator traction_;
  layers::InteractionOperator single_;
  std::vector<std::shared_ptr<const Eigen::PartialPivLU<MatX>>> factors_;
};

}  // namespace rbs::mobility

#endif
