#ifndef RBS_DYNAMICS_CONTACT_HPP
#define RBS_DYNAMICS_CONTACT_HPP

#include <functional>
#include <vector>

#include "rbs/surface/particle_surface.hpp"

namespace rbs::dynamics {

struct Contact {
  int i = 0;
  int j = 0;
  /// Midpoint of the closest node pair.
  Vec3 point = Vec3::Zero();
  /// Unit vector from body i's closest node towards body j's.
  Vec3 normal = Vec3::UnitX();
  double gap = 0.0;
};

/// 0.05 times the smallest body diameter.
double default_contact_delta(const std::vector<surface::ParticleSurface>& bodies);

/// Pairs whose closest nodes are nearer than delta. Throws GeometryError
/// when a node of one body lies inside another.
std::vector<Contact> detect_contacts(const std::vector<surface::ParticleSurface>& bodies, double delta);

/// D: 3 n_c x 6 n, stacked (v_i, omega_i) to velocity differences u_i - u_j at
/// the contact points. The force map C is its transpose.
MatX contact_velocity_map(const std::vector<Contact>& contacts, const std::vector<surface::ParticleSurface>& bodies);

/// Stacked (F_i, T_i) to stacked (v_i, omega_i).
using MobilityMap = std::function<VecX(const VecX& loads)>;

struct ContactCorrection {
  VecX forces;       ///< F_c, 3 per contact (on body i; body j gets the opposite)
  VecX velocities;   ///< V0 + M C F_c
  MatX MC;           ///< mobility response to each contact force column
};

/// Solves (D M C) F_c = -D V0 with M C assembled from 3 n_c mobility solves.
/// Throws ContactError if D M C is singular.
ContactCorrection contact_forces(const std::vector<Contact>& contacts, const std::vector<surface::ParticleSurface>& bodies,
                                 const VecX& V0, const MobilityMap& mobility);

}  // namespace rbs::dynamics

#endif
