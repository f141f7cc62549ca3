#include "rbs/app/forcing.hpp"

#include <cmath>

#include "rbs/errors.hpp"

namespace rbs::app {

Loads swimmer_forcing(double t, bool torques, size_t n_bodies) {
  if (n_bodies != 3) throw ConfigError("swimmer forcing needs exactly 3 bodies");
  const double c = std::cos(t), s = std::sin(t);
  const double amp[3] = {2.0 * c + s, s - c, -c - 2.0 * s};
  Loads out;
  for (double a : amp) {
    out.forces.push_back(a * Vec3::UnitX());
    out.torques.push_back(torques ? Vec3(a * Vec3::UnitY()) : Vec3::Zero());
  }
  return out;
}

Loads gravity_forcing(const std::vector<double>& delta_mass, const Vec3& g) {
  Loads out;
  for (double dm : delta_mass) {
    out.forces.push_back(dm * g);
    out.torques.push_back(Vec3::Zero());
  }
  return out;
}

Loads evaluate_forcing(const ForcingSpec& forcing, const std::vector<BodySpec>& bodies, double t) {
  switch (forcing.type) {
    case ForcingSpec::Type::Gravity: {
      std::vector<double> dm;
      for (const auto& b : bodies) dm.push_back(b.delta_mass);
      return gravity_forcing(dm, forcing.g);
    }
    case ForcingSpec::Type::Swimmer: return swimmer_forcing(t, forcing.swimmer_torques, bodies.size());
    case ForcingSpec::Type::Explicit: {
      if (forcing.tables.size() != bodies.size()) throw ConfigError("explicit forcing needs one table per body");
      Loads out;
      for (const auto& table : forcing.tables) {
        out.forces.push_back(table.force_at(t));
        out.torques.push_back(table.torque_at(t));
      }
      return out;
    }
    case ForcingSpec::Type::None: break;
  }
  return Loads{std::vector<Vec3>(bodies.size(), Vec3::Zero()), std::vector<Vec3>(bodies.size(), Vec3::Zero())};
}

}  // namespace rbs::app
