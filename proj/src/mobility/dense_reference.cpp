#include "rbs/mobility/dense_reference.hpp"

#include "rbs/errors.hpp"
#include "rbs/layers/self_block.hpp"

namespace rbs::mobility {

using layers::KernelTag;
using surface::ParticleSurface;

DenseOperators assemble_dense(const std::vector<ParticleSurface>& bodies, const layers::NearOptions& opts) {
  if (bodies.empty() || bodies.size() > 2) throw InvalidArgument("dense reference supports one or two bodies");
  for (const auto& b : bodies)
    if (b.degree() > 8) throw InvalidArgument("dense reference supports p <= 8");
  const auto off = body_offsets(bodies);
  const Eigen::Index N = off.back();
  const int n = static_cast<int>(bodies.size());
  DenseOperators ops;
  ops.half_plus_K = MatX::Zero(N, N);
  ops.S = MatX::Zero(N, N);
  ops.L = MatX::Zero(N, N);
  ops.G = MatX::Zero(6 * n, N);
  for (int i = 0; i < n; ++i) {
    const auto self = layers::singular_self_matrices(bodies[i], {KernelTag::StokesSingle, KernelTag::StokesTraction});
    ops.S.block(off[i], off[i], self[0].matrix.rows(), self[0].matrix.cols()) = self[0].matrix;
    ops.half_plus_K.block(off[i], off[i], self[1].matrix.rows(), self[1].matrix.cols()) = self[1].matrix;
    ops.L.block(off[i], off[i], 3 * bodies[i].node_count(), 3 * bodies[i].node_count()) = L_matrix(bodies[i]);
    for (int l = 0; l < bodies[i].node_count(); ++l) {
      const double w = bodies[i].weights()(l);
      const Vec3 r = bodies[i].positions().row(l).transpose() - bodies[i].centroid();
      ops.G.block<3, 3>(6 * i, off[i] + 3 * l) = w * Mat3::Identity();
      ops.G.block<3, 3>(6 * i + 3, off[i] + 3 * l) = w * cross_matrix(r);
    }
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // Targets near body j get the upsampled rule, the rest the smooth one.
      const PointSet& x = bodies[i].positions();
      const PointSet& nx = bodies[i].normals();
      for (int t = 0; t < bodies[i].node_count(); ++t) {
        const int kappa = layers::in_near_zone(bodies[j], x.row(t).transpose(), opts) ? opts.upsample : 1;
        const PointSet xt = x.row(t), nt = nx.row(t);
        ops.S.block(off[i] + 3 * t, off[j], 3, off[j + 1] - off[j]) =
            layers::layer_matrix(KernelTag::StokesSingle, bodies[j], xt, nullptr, kappa);
        ops.half_plus_K.block(off[i] + 3 * t, off[j], 3, off[j + 1] - off[j]) =
            layers::layer_matrix(KernelTag::StokesTraction, bodies[j], xt, &nt, kappa);
      }
    }
  }
  ops.half_plus_K.diagonal().array() += 0.5;
  for (int i = 0; i < n; ++i) {
    const Eigen::Index m = off[i + 1] - off[i];
    ops.half_plus_K.middleRows(off[i], m) = remove_moments(MatX(ops.half_plus_K.middleRows(off[i], m)), bodies[i]);
  }
  return ops;
}

MobilitySolution dense_solve(const std::vector<ParticleSurface>& bodies, const std::vector<Vec3>& forces,
                             const std::vector<Vec3>& torques, const layers::NearOptions& opts) {
  if (forces.size() != bodies.size() || torques.size() != bodies.size())
    throw InvalidArgument("one force and one torque per body are required");
  const DenseOperators ops = assemble_dense(bodies, opts);
  std::vector<PointSet> parts;
  for (size_t i = 0; i < bodies.size(); ++i) parts.push_back(incident_density(forces[i], torques[i], bodies[i]));
  MobilitySolution sol;
  sol.rho = stack_fields(parts);
  const Eigen::Index N = sol.rho.size();
  MatX stacked(N + ops.G.rows(), N);
  stacked << ops.half_plus_K, ops.G;
  VecX b = VecX::Zero(stacked.rows());
  b.head(N) = -ops.half_plus_K * sol.rho;
  sol.mu = stacked.colPivHouseholderQr().solve(b);
  sol.u = ops.S * (sol.rho + sol.mu);
  for (size_t i = 0; i < bodies.size(); ++i) {
    BodyKinetics k;
    k.force = forces[i];
    k.torque = torques[i];
    const RigidVelocity rv = extract_rigid_velocity(PointSet(body_field(sol.u, bodies, i)), bodies[i]);
    k.v = rv.v;
    k.omega = rv.omega;
    sol.kinetics.push_back(k);
  }
  sol.report.residual = (stacked * sol.mu - b).norm() / std::max(b.norm(), 1e-300);
  return sol;
}

double dense_condition_number(const DenseOperators& ops) {
  const Eigen::JacobiSVD<MatX> svd(ops.half_plus_K + ops.L);
  const VecX& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

MatX grand_mobility_matrix(const std::vector<ParticleSurface>& bodies, MobilityContext& ctx, const SolverOptions& opts) {
  const int n = static_cast<int>(bodies.size());
  const MobilitySystem system(bodies, ctx, opts);
  MatX M(6 * n, 6 * n);
  for (int col = 0; col < 6 * n; ++col) {
    std::vector<PointSet> parts;
    for (int i = 0; i < n; ++i) {
      Vec3 F = Vec3::Zero(), T = Vec3::Zero();
      if (col / 6 == i) (col % 6 < 3 ? F : T)(col % 3) = 1.0;
      parts.push_back(incident_density(F, T, bodies[i]));
    }
    const MobilitySolution sol = solve_with_incident(system, stack_fields(parts), opts);
    for (int i = 0; i < n; ++i) {
      M.block<3, 1>(6 * i, col) = sol.kinetics[i].v;
      M.block<3, 1>(6 * i + 3, col) = sol.kinetics[i].omega;
    }
  }
  return M;
}

}  // namespace rbs::mobility
