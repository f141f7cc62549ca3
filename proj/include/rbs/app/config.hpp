#ifndef RBS_APP_CONFIG_HPP
#define RBS_APP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbs/dynamics/integrator.hpp"
#include "rbs/magnetics/magnetics.hpp"
#include "rbs/mobility/system.hpp"

namespace rbs::app {

inline constexpr int kConfigVersion = 1;

struct BodySpec {
  std::string shape = "sphere(1)";
  Vec3 centroid = Vec3::Zero();
  Quat orientation = Quat::Identity();
  /// Excess mass over the displaced fluid, used by gravity forcing.
  double delta_mass = 1.0;
};

/// Piecewise-linear force/torque schedule of one body; constant if it has one knot.
struct ForceTable {
  std::vector<double> times;
  std::vector<Vec3> forces;
  std::vector<Vec3> torques;

  Vec3 force_at(double t) const;
  Vec3 torque_at(double t) const;
};

struct ForcingSpec {
  enum class Type { None, Gravity, Swimmer, Explicit };
  Type type = Type::None;
  Vec3 g = Vec3(0.0, 0.0, -1.0);
  bool swimmer_torques = false;
  std::vector<ForceTable> tables;
};

struct MagneticsSpec {
  bool enabled = false;
  magnetics::MagneticConfig field;
};

struct SteppingSpec {
  dynamics::Scheme scheme = dynamics::Scheme::RK4;
  double dt = 0.1;
  double t_final = 1.0;
  bool contact = false;
  std::optional<double> contact_delta;
};

struct OutputSpec {
  std::string trajectory = "trajectory.csv";
  bool surfaces = false;
  int surface_every = 1;
  bool profile = false;
};

struct ScenarioConfig {
  int version = kConfigVersion;
  int p = 8;
  std::uint64_t seed = 0;
  std::string shape_library;
  std::vector<BodySpec> bodies;
  ForcingSpec forcing;
  MagneticsSpec magnetics;
  mobility::SolverOptions solver;
  SteppingSpec stepping;
  OutputSpec output;
};

/// Strict parser: unknown keys, wrong types and invalid values throw ConfigError.
/// Relative shape-library paths are resolved against base_dir.
ScenarioConfig parse_config(const std::string& json_text, const std::string& base_dir = "");
ScenarioConfig load_config(const std::string& path);
std::string to_json(const ScenarioConfig& cfg);

/// n_x x n_y x n_z lattice of identical bodies; jitter > 0 perturbs the
/// centroids uniformly in [-jitter, jitter] with the given seed.
std::vector<BodySpec> lattice_bodies(const std::string& shape, int nx, int ny, int nz, double spacing,
                                     const Vec3& origin = Vec3::Zero(), double jitter = 0.0, std::uint64_t seed = 0);

}  // namespace rbs::app

#endif
