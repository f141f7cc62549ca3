#ifndef RBS_DYNAMICS_INTEGRATOR_HPP
#define RBS_DYNAMICS_INTEGRATOR_HPP

#include <functional>
#include <string>
#include <vector>

#include "rbs/surface/particle_surface.hpp"

namespace rbs::dynamics {

enum class Scheme { Euler, Heun, RK4 };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

/// Explicit Butcher tableau.
struct Tableau {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
  int stages() const { return static_cast<int>(b.size()); }
};
const Tableau& tableau(Scheme s);

struct StageVelocities {
  std::vector<Vec3> v;
  std::vector<Vec3> omega;
  int iterations = 0;
  double residual = 0.0;
};

/// Rigid velocities of all bodies for a trial configuration at time t.
using StageFunction = std::function<StageVelocities(double t, const std::vector<surface::Pose>& poses)>;

struct SystemState {
  double t = 0.0;
  std::vector<surface::Pose> poses;
  Scheme scheme = Scheme::RK4;
  double dt = 0.0;
};

struct StepResult {
  /// Velocities at the start of the step (first stage).
  StageVelocities initial;
  int iterations = 0;    ///< summed over stages
  double residual = 0.0; ///< largest over stages
};

/// One Runge-Kutta step: centroids by the tableau, orientations by
/// Munthe-Kaas stages, q = exp(Theta) q0 with Theta built from dexpinv of
/// the stage angular velocities. Advances state.t by state.dt.
StepResult step(SystemState& state, const StageFunction& velocities);

}  // namespace rbs::dynamics

#endif
