#ifndef RBS_APP_SCENARIO_HPP
#define RBS_APP_SCENARIO_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rbs/app/config.hpp"
#include "rbs/dynamics/contact.hpp"
#include "rbs/errors.hpp"
#include "rbs/layers/fast_summation.hpp"

namespace rbs::app {

struct TrajectoryRecord {
  double t = 0.0;
  int body = 0;
  Vec3 centroid = Vec3::Zero();
  Quat orientation = Quat::Identity();
  /// Velocities at the first stage of the step that produced this pose.
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  int iterations = 0;
  double residual = 0.0;
};

/// Seconds spent per stage of one time step.
struct StepProfile {
  double setup = 0.0;     ///< operator construction: near corrections, factors
  double solve = 0.0;     ///< GMRES: system applications and preconditioner
  double velocity = 0.0;  ///< u = S[rho + mu] and rigid-velocity extraction
  double magnetics = 0.0;
  double contact = 0.0;
  double update = 0.0;    ///< pose updates and geometry rebuilds
  double output = 0.0;
  double wall = 0.0;

  double accounted() const { return setup + solve + velocity + magnetics + contact + update + output; }
  StepProfile& operator+=(const StepProfile& o);
};

struct ProfileReport {
  double block_build = 0.0;
  std::vector<StepProfile> steps;

  StepProfile mean() const;
  std::string to_text() const;
};

struct RunOptions {
  std::string out_dir;
  bool dump_surfaces = false;
  bool profile = false;
  /// Write the trajectory file (and dumps) under out_dir.
  bool write_files = true;
};

struct RunResult {
  std::vector<TrajectoryRecord> records;
  ProfileReport profile;
  std::vector<surface::Pose> final_poses;
  double t = 0.0;
  int steps = 0;
  std::optional<double> condition_number;
};

/// A failure during time stepping, tagged with the step that failed.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, int step, bool solver_failure)
      : Error(what), step(step), solver_failure(solver_failure) {}
  int step;
  bool solver_failure;
};

struct StageOutput {
  dynamics::StageVelocities velocities;
  /// rho + mu over all bodies (with the contact-force contribution).
  VecX total_density;
  std::vector<surface::ParticleSurface> surfaces;
};

class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg, std::shared_ptr<const layers::FastSummation> provider = nullptr);

  const ScenarioConfig& config() const { return cfg_; }
  std::vector<surface::Pose> initial_poses() const;
  std::vector<surface::ParticleSurface> surfaces(const std::vector<surface::Pose>& poses) const;
  mobility::MobilityContext& context() { return ctx_; }

  /// Rigid velocities for one configuration (one Runge-Kutta stage).
  StageOutput evaluate(double t, const std::vector<surface::Pose>& poses,
                       const std::vector<dynamics::Contact>* contacts = nullptr, StepProfile* profile = nullptr);

  RunResult run(const RunOptions& opts = {});

 private:
  ScenarioConfig cfg_;
  std::vector<surface::ShapePtr> shapes_;
  mobility::MobilityContext ctx_;
  VecX last_q_;
  double block_build_ = 0.0;
};

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

}  // namespace rbs::app

#endif
