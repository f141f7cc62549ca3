#ifndef RBS_APP_HARNESS_HPP
#define RBS_APP_HARNESS_HPP

#include <array>
#include <string>
#include <vector>

#include "rbs/app/config.hpp"
#include "rbs/dynamics/integrator.hpp"

namespace rbs::app {

enum class ConvergenceKind { Spatial, Temporal };
ConvergenceKind parse_convergence_kind(const std::string& s);
std::string to_string(ConvergenceKind k);

/// "sphere" -> "sphere(1)", "ellipsoid-<a>" -> "ellipsoid(a,a,1)"; other names pass through.
std::string harness_shape(const std::string& name);

/// Three bodies on the x axis driven by the periodic swimmer forces.
ScenarioConfig swimmer_config(const std::string& shape, int p, dynamics::Scheme scheme, double dt, double t_final,
                              bool torques = true, double spacing = 4.0);

struct ConvergenceOptions {
  bool torques = true;
  double tol = 1e-12;
  double t_final = 6.283185307179586;
  double spacing = 4.0;
  /// Spatial runs: degrees (compared pairwise p vs 2p); time step 2 pi / spatial_steps.
  std::vector<int> degrees{2, 4, 8, 16};
  int spatial_steps = 128;
  dynamics::Scheme spatial_scheme = dynamics::Scheme::Euler;
  /// Temporal runs: steps per period (compared pairwise n vs 2n) at degree temporal_p.
  std::vector<int> steps{16, 32, 64, 128, 256};
  int temporal_p = 8;
};

struct ConvergenceRow {
  std::string label;   ///< "p=4" or "dt=2pi/32"
  double E_C = 0.0;
  double E_R = 0.0;
};

struct ConvergenceTable {
  ConvergenceKind kind = ConvergenceKind::Spatial;
  dynamics::Scheme scheme = dynamics::Scheme::Euler;
  std::string shape;
  std::vector<ConvergenceRow> rows;
  double seconds = 0.0;

  /// Rows E_C and E_R, one column per resolution.
  std::string to_csv() const;
};

/// For spatial runs the scheme argument overrides options.spatial_scheme.
ConvergenceTable convergence_harness(ConvergenceKind kind, dynamics::Scheme scheme, const std::string& shape,
                                     const ConvergenceOptions& options = {});

struct ScalingOptions {
  double spacing = 5.0;
  int steps = 1;
  int repeats = 3;
  double tol = 1e-6;
  double dt = 0.1;
  std::string shape = "sphere(1)";
};

struct ScalingRow {
  int n = 0;
  int p = 0;
  int nodes = 0;
  double inter_apply = 0.0;  ///< one inter-body apply of the traction operator (min over repeats)
  double self_apply = 0.0;
  double block_build = 0.0;
  double setup = 0.0;        ///< per step
  double solve = 0.0;
  double velocity = 0.0;
  double update = 0.0;
  double total = 0.0;
  int iterations = 0;
};

/// Factors n into an (nx, ny, nz) lattice as close to cubic as possible.
std::array<int, 3> lattice_dims(int n);

std::vector<ScalingRow> scaling_harness(const std::vector<int>& n, const std::vector<int>& p,
                                        const ScalingOptions& options = {});
std::string scaling_csv(const std::vector<ScalingRow>& rows);

}  // namespace rbs::app

#endif
