#ifndef RBS_MOBILITY_SOLVER_HPP
#define RBS_MOBILITY_SOLVER_HPP

#include <vector>

#include "rbs/mobility/gmres.hpp"
#include "rbs/mobility/system.hpp"

namespace rbs::mobility {

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
  double setup_seconds = 0.0;      ///< operator construction (near corrections, factors)
  double apply_seconds = 0.0;      ///< system applications inside GMRES
  double precondition_seconds = 0.0;
  double velocity_seconds = 0.0;   ///< u = S[rho + mu] and rigid-velocity extraction
};

struct BodyKinetics {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

struct MobilitySolution {
  VecX rho;
  VecX mu;
  /// Surface velocity S[rho + mu] on every body.
  VecX u;
  std::vector<BodyKinetics> kinetics;
  SolveReport report;
};

/// Prescribed forces and torques per body.
MobilitySolution solve_mobility(const std::vector<surface::ParticleSurface>& bodies, const std::vector<Vec3>& forces,
                                const std::vector<Vec3>& torques, MobilityContext& ctx, const SolverOptions& opts = {});

/// Any incident density (its moments act as the applied forces and torques).
/// `mu0` is an optional GMRES starting guess.
MobilitySolution solve_with_incident(const std::vector<surface::ParticleSurface>& bodies, const VecX& rho,
                                     MobilityContext& ctx, const SolverOptions& opts = {}, const VecX* mu0 = nullptr);

/// Same as above on a prebuilt system.
MobilitySolution solve_with_incident(const MobilitySystem& system, const VecX& rho, const SolverOptions& opts = {},
                                     const VecX* mu0 = nullptr);

/// u = S[density] at fluid targets; throws DomainError for targets on or inside a body.
PointSet evaluate_velocity(const std::vector<surface::ParticleSurface>& bodies, const VecX& density,
                           const PointSet& targets,
                           const layers::NearOptions& opts = layers::field_evaluation_options());

}  // namespace rbs::mobility

#endif
