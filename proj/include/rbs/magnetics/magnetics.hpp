#ifndef RBS_MAGNETICS_MAGNETICS_HPP
#define RBS_MAGNETICS_MAGNETICS_HPP

#include <vector>

#include "rbs/mobility/solver.hpp"

// Paramagnetic bodies (relative permeability mu_ratio) in a uniform imposed
// field H0, exterior permeability 1. The potential is phi = -H0.x + S^L[q].
namespace rbs::magnetics {

struct MagneticConfig {
  Vec3 H0 = Vec3::Zero();
  double mu_ratio = 1.0;

  /// (mu - mu0) / (mu + mu0).
  double eta() const { return (mu_ratio - 1.0) / (mu_ratio + 1.0); }
  void validate() const;
};

struct PotentialSolution {
  /// Charge density, one value per node, bodies concatenated.
  VecX q;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// (1/2 I + eta K^L) q = eta H0.n with the block-diagonal preconditioner.
PotentialSolution solve_potential(const std::vector<surface::ParticleSurface>& bodies, const MagneticConfig& cfg,
                                  mobility::MobilityContext& ctx, const mobility::SolverOptions& opts = {},
                                  const VecX* q0 = nullptr);

/// One-sided fields on every body: H_plus outside, H_minus inside.
struct SurfaceFields {
  std::vector<PointSet> H_plus;
  std::vector<PointSet> H_minus;
  /// Boundary values of S^L[q].
  std::vector<VecX> phi_s;
  /// K^L[q] at the nodes.
  std::vector<VecX> KLq;
};
SurfaceFields surface_fields(const std::vector<surface::ParticleSurface>& bodies, const PotentialSolution& sol,
                             const MagneticConfig& cfg, mobility::MobilityContext& ctx,
                             const layers::NearOptions& opts = {});

enum class Side { Interior, Exterior, OffSurface };

/// H = H0 - grad S^L[q] at targets off the surfaces. Exterior targets inside
/// a body, or interior targets outside every body, throw DomainError.
PointSet magnetic_field(const std::vector<surface::ParticleSurface>& bodies, const PotentialSolution& sol,
                        const MagneticConfig& cfg, const PointSet& targets, Side side,
                        const layers::NearOptions& opts = layers::field_evaluation_options());

/// Jump of the Maxwell stress across the surface, exterior (mu0 = 1, H+) minus
/// interior (mu_ratio, H-): [(H H^T - |H|^2/2 I) n].
PointSet maxwell_traction(const PointSet& H_plus, const PointSet& H_minus, const PointSet& normals, double mu_ratio);

/// Maxwell tractions of all bodies, stacked as a mobility incident density.
VecX magnetic_incident_density(const std::vector<surface::ParticleSurface>& bodies, const SurfaceFields& fields,
                               const MagneticConfig& cfg);

/// Net force and torque of the Maxwell tractions per body.
std::vector<mobility::Moments> magnetic_moments(const std::vector<surface::ParticleSurface>& bodies,
                                                const VecX& incident);

struct MagneticStepResult {
  PotentialSolution potential;
  mobility::MobilitySolution mobility;
};

/// Potential solve, Maxwell tractions used as the incident density, then the
/// scattered Stokes solve. Previous q and mu may seed the two GMRES solves.
MagneticStepResult magnetic_mobility_step(const std::vector<surface::ParticleSurface>& bodies, const MagneticConfig& cfg,
                                          mobility::MobilityContext& ctx, const mobility::SolverOptions& opts = {},
                                          const VecX* q0 = nullptr, const VecX* mu0 = nullptr);

/// Point-dipole moment of a magnetizable sphere of radius a: 4 pi beta a^3 H0
/// with beta = (mu - 1) / (mu + 2).
Vec3 sphere_dipole_moment(const MagneticConfig& cfg, double radius);

/// Force on dipole m2 at r (relative to m1) in the field of m1.
Vec3 dipole_pair_force(const Vec3& m1, const Vec3& m2, const Vec3& r);

}  // namespace rbs::magnetics

#endif
