#ifndef RBS_APP_FORCING_HPP
#define RBS_APP_FORCING_HPP

#include <vector>

#include "rbs/app/config.hpp"

namespace rbs::app {

struct Loads {
  std::vector<Vec3> forces;
  std::vector<Vec3> torques;
};

/// Three-sphere swimmer schedule along e1; with torques the same amplitudes
/// are applied about e2. Requires n_bodies == 3.
Loads swimmer_forcing(double t, bool torques, size_t n_bodies = 3);

/// F_i = delta_m_i g, T_i = 0.
Loads gravity_forcing(const std::vector<double>& delta_mass, const Vec3& g);

Loads evaluate_forcing(const ForcingSpec& forcing, const std::vector<BodySpec>& bodies, double t);

}  // namespace rbs::app

#endif
