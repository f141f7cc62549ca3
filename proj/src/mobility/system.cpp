#include "rbs/mobility/system.hpp"

#include "rbs/errors.hpp"

namespace rbs::mobility {

using surface::ParticleSurface;

MobilityContext::MobilityContext(std::shared_ptr<const layers::FastSummation> provider) : provider_(std::move(provider)) {
  if (!provider_) provider_ = std::make_shared<layers::DirectSummation>();
}

std::shared_ptr<const Eigen::PartialPivLU<MatX>> MobilityContext::stokes_factor(const surface::ShapePtr& shape) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = stokes_.find(shape.get());
    if (it != stokes_.end()) return it->second;
  }
  const ParticleSurface ref(shape, Vec3::Zero());
  MatX A = blocks_.get(shape, layers::KernelTag::StokesTraction)->matrix;
  A.diagonal().array() += 0.5;
  A = remove_moments(A, ref) + L_matrix(ref);
  auto lu = std::make_shared<const Eigen::PartialPivLU<MatX>>(A);
  std::lock_guard<std::mutex> lock(mutex_);
  keep_alive_.push_back(shape);
  return stokes_.emplace(shape.get(), lu).first->second;
}

std::shared_ptr<const Eigen::PartialPivLU<MatX>> MobilityContext::laplace_factor(const surface::ShapePtr& shape,
                                                                                  double eta) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = laplace_.find({shape.get(), eta});
    if (it != laplace_.end()) return it->second;
  }
  MatX A = eta * blocks_.get(shape, layers::KernelTag::LaplaceAdjointDouble)->matrix;
  A.diagonal().array() += 0.5;
  auto lu = std::make_shared<const Eigen::PartialPivLU<MatX>>(A);
  std::lock_guard<std::mutex> lock(mutex_);
  keep_alive_.push_back(shape);
  return laplace_.emplace(std::make_pair(shape.get(), eta), lu).first->second;
}

PointSet incident_density(const Vec3& F, const Vec3& T, const ParticleSurface& s) {
  const Vec3 a = s.inertia().ldlt().solve(T);
  PointSet rho(s.node_count(), 3);
  for (int i = 0; i < s.node_count(); ++i) {
    const Vec3 r = s.positions().row(i).transpose() - s.centroid();
    rho.row(i) = (F / s.area() + a.cross(r)).transpose();
  }
  return rho;
}

Moments apply_G(const PointSet& mu, const ParticleSurface& s) {
  if (mu.rows() != s.node_count()) throw InvalidArgument("density size does not match the surface");
  Moments out;
  for (int i = 0; i < s.node_count(); ++i) {
    const Vec3 r = s.positions().row(i).transpose() - s.centroid();
    const Vec3 m = mu.row(i).transpose();
    out.force += s.weights()(i) * m;
    out.torque += s.weights()(i) * r.cross(m);
  }
  return out;
}

PointSet apply_L(const PointSet& mu, const ParticleSurface& s) {
  const Moments g = apply_G(mu, s);
  PointSet out(s.node_count(), 3);
  for (int i = 0; i < s.node_count(); ++i) {
    const Vec3 r = s.positions().row(i).transpose() - s.centroid();
    out.row(i) = (g.force + g.torque.cross(r)).transpose();
  }
  return out;
}

std::vector<Eigen::Index> body_offsets(const std::vector<ParticleSurface>& bodies) {
  std::vector<Eigen::Index> off(bodies.size() + 1, 0);
  for (size_t i = 0; i < bodies.size(); ++i) off[i + 1] = off[i] + 3 * bodies[i].node_count();
  return off;
}

Eigen::Map<const PointSet> body_field(const VecX& v, const std::vector<ParticleSurface>& bodies, int body) {
  const auto off = body_offsets(bodies);
  if (v.size() != off.back()) throw ConsistencyError("vector size does not match the configuration");
  return Eigen::Map<const PointSet>(v.data() + off[body], bodies[body].node_count(), 3);
}

VecX stack_fields(const std::vector<PointSet>& fields) {
  Eigen::Index n = 0;
  for (const auto& f : fields) n += f.size();
  VecX out(n);
  n = 0;
  for (const auto& f : fields) {
    out.segment(n, f.size()) = Eigen::Map<const VecX>(f.data(), f.size());
    n += f.size();
  }
  return out;
}

VecX apply_L(const VecX& mu, const std::vector<ParticleSurface>& bodies) {
  std::vector<PointSet> parts;
  for (size_t i = 0; i < bodies.size(); ++i) parts.push_back(apply_L(PointSet(body_field(mu, bodies, i)), bodies[i]));
  return stack_fields(parts);
}

MatX L_matrix(const ParticleSurface& s) {
  const int m = s.node_count();
  MatX L(3 * m, 3 * m);
  std::vector<Mat3> cr(m);
  for (int i = 0; i < m; ++i) cr[i] = cross_matrix(s.positions().row(i).transpose() - s.centroid());
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l)
      L.block<3, 3>(3 * i, 3 * l) = s.weights()(l) * (Mat3::Identity() - cr[i] * cr[l]);
  return L;
}

VecX remove_moments(const VecX& f, const std::vector<ParticleSurface>& bodies) {
  std::vector<PointSet> parts;
  for (size_t i = 0; i < bodies.size(); ++i) {
    PointSet v(body_field(f, bodies, i));
    const Moments g = apply_G(v, bodies[i]);
    v -= incident_density(g.force, g.torque, bodies[i]);
    parts.push_back(std::move(v));
  }
  return stack_fields(parts);
}

MatX remove_moments(const MatX& A, const ParticleSurface& s) {
  const int m = s.node_count();
  if (A.rows() != 3 * m) throw InvalidArgument("operator size does not match the surface");
  MatX G = MatX::Zero(6, 3 * m);
  MatX W(3 * m, 6);
  const Mat3 tinv = s.inertia().inverse();
  for (int i = 0; i < m; ++i) {
    const Mat3 rx = cross_matrix(s.positions().row(i).transpose() - s.centroid());
    G.block<3, 3>(0, 3 * i) = s.weights()(i) * Mat3::Identity();
    G.block<3, 3>(3, 3 * i) = s.weights()(i) * rx;
    W.block<3, 3>(3 * i, 0) = Mat3::Identity() / s.area();
    W.block<3, 3>(3 * i, 3) = -rx * tinv;
  }
  return A - W * (G * A);
}

RigidVelocity extract_rigid_velocity(const PointSet& u, const ParticleSurface& s) {
  if (u.rows() != s.node_count()) throw InvalidArgument("velocity size does not match the surface");
  RigidVelocity out;
  Vec3 ang = Vec3::Zero();
  for (int i = 0; i < s.node_count(); ++i) {
    const Vec3 r = s.positions().row(i).transpose() - s.centroid();
    out.v += s.weights()(i) * u.row(i).transpose();
    ang += s.weights()(i) * r.cross(u.row(i).transpose());
  }
  out.v /= s.area();
  out.omega = s.inertia().ldlt().solve(ang);
  return out;
}

MobilitySystem::MobilitySystem(const std::vector<ParticleSurface>& bodies, MobilityContext& ctx,
                               const SolverOptions& opts)
    : bodies_(bodies),
      offsets_(body_offsets(bodies)),
      size_(offsets_.back()),
      opts_(opts),
      traction_(bodies, layers::KernelTag::StokesTraction, ctx.blocks(), ctx.provider(), opts.near),
      single_(bodies, layers::KernelTag::StokesSingle, ctx.blocks(), ctx.provider(), opts.near) {
  if (bodies.empty()) throw InvalidArgument("mobility system needs at least one body");
  if (opts.preconditioner)
    for (const auto& b : bodies_) factors_.push_back(ctx.stokes_factor(b.shape()));
}

VecX MobilitySystem::apply_half_plus_K(const VecX& mu) const {
  return remove_moments(VecX(0.5 * mu + traction_.apply(mu)), bodies_);
}

VecX MobilitySystem::apply_L(const VecX& mu) const { return mobility::apply_L(mu, bodies_); }

VecX MobilitySystem::apply_system(const VecX& mu) const { return apply_half_plus_K(mu) + apply_L(mu); }

VecX MobilitySystem::rhs(const VecX& rho) const { return -apply_half_plus_K(rho); }

VecX MobilitySystem::single_layer(const VecX& density) const { return single_.apply(density); }

VecX MobilitySystem::precondition(const VecX& r) const {
  if (r.size() != size_) throw ConsistencyError("vector size does not match the configuration");
  if (factors_.empty()) return r;
  VecX out(size_);
  for (size_t i = 0; i < bodies_.size(); ++i) {
    const Eigen::Index m = bodies_[i].node_count();
    const Mat3& R = bodies_[i].rotation();
    const PointSet body = Eigen::Map<const PointSet>(r.data() + offsets_[i], m, 3) * R;
    const VecX z = factors_[i]->solve(Eigen::Map<const VecX>(body.data(), body.size()));
    const PointSet world = Eigen::Map<const PointSet>(z.data(), m, 3) * R.transpose();
    out.segment(offsets_[i], 3 * m) = Eigen::Map<const VecX>(world.data(), world.size());
  }
  return out;
}

void MobilitySystem::check_poses(const std::vector<ParticleSurface>& bodies) const {
  if (bodies.size() != bodies_.size()) throw ConsistencyError("body count changed since the system was built");
  for (size_t i = 0; i < bodies.size(); ++i) {
    const bool same = bodies[i].shape() == bodies_[i].shape() &&
                      (bodies[i].centroid() - bodies_[i].centroid()).norm() == 0.0 &&
                      bodies[i].orientation().coeffs() == bodies_[i].orientation().coeffs();
    if (!same) throw ConsistencyError("body " + std::to_string(i) + " moved since the system was built");
  }
}

}  // namespace rbs::mobility
