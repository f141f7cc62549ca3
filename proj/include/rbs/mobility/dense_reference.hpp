#ifndef RBS_MOBILITY_DENSE_REFERENCE_HPP
#define RBS_MOBILITY_DENSE_REFERENCE_HPP

#include <vector>

#include "rbs/mobility/solver.hpp"

namespace rbs::mobility {

/// Fully assembled operators of a small configuration (at most 2 bodies,
/// p <= 8), built straight from kernels and fresh world-frame self blocks.
struct DenseOperators {
  MatX half_plus_K;  ///< 1/2 I + K
  MatX L;
  MatX G;            ///< 6n x N: stacked net force and torque per body
  MatX S;            ///< single layer on all surfaces
};

DenseOperators assemble_dense(const std::vector<surface::ParticleSurface>& bodies, const layers::NearOptions& opts = {});

/// Solves (1/2 I + K) mu = -(1/2 I + K) rho together with G mu = 0 by least
/// squares, then u = S (rho + mu).
MobilitySolution dense_solve(const std::vector<surface::ParticleSurface>& bodies, const std::vector<Vec3>& forces,
                             const std::vector<Vec3>& torques, const layers::NearOptions& opts = {});

/// 2-norm condition number of (1/2 I + K + L).
double dense_condition_number(const DenseOperators& ops);

/// 6n x 6n map from stacked (F_i, T_i) to stacked (v_i, omega_i), one
/// matrix-free solve per column.
MatX grand_mobility_matrix(const std::vector<surface::ParticleSurface>& bodies, MobilityContext& ctx,
                           const SolverOptions& opts = {});

}  // namespace rbs::mobility

#endif
