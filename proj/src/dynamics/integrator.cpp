#include "rbs/dynamics/integrator.hpp"

#include "rbs/dynamics/rotation.hpp"
#include "rbs/errors.hpp"

namespace rbs::dynamics {

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::Euler;
  if (name == "heun" || name == "trapezoidal") return Scheme::Heun;
  if (name == "rk4") return Scheme::RK4;
  throw InvalidArgument("unknown time stepping scheme '" + name + "'");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Euler: return "euler";
    case Scheme::Heun: return "heun";
    case Scheme::RK4: return "rk4";
  }
  return "unknown";
}

const Tableau& tableau(Scheme s) {
  static const Tableau euler{{{}}, {1.0}, {0.0}};
  static const Tableau heun{{{}, {1.0}}, {0.5, 0.5}, {0.0, 1.0}};
  static const Tableau rk4{{{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}}, {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}, {0.0, 0.5, 0.5, 1.0}};
  switch (s) {
    case Scheme::Euler: return euler;
    case Scheme::Heun: return heun;
    case Scheme::RK4: return rk4;
  }
  return rk4;
}

StepResult step(SystemState& state, const StageFunction& velocities) {
  if (!(state.dt > 0.0)) throw InvalidArgument("time step must be positive");
  const Tableau& tab = tableau(state.scheme);
  const size_t n = state.poses.size();
  const int s = tab.stages();
  std::vector<std::vector<Vec3>> kv(s), kw(s);
  std::vector<std::vector<Vec3>> theta(s, std::vector<Vec3>(n, Vec3::Zero()));
  StepResult result;

  for (int k = 0; k < s; ++k) {
    std::vector<surface::Pose> trial = state.poses;
    for (size_t i = 0; i < n; ++i) {
      Vec3 dc = Vec3::Zero(), th = Vec3::Zero();
      for (int l = 0; l < k; ++l) {
        dc += tab.a[k][l] * kv[l][i];
        th += tab.a[k][l] * kw[l][i];
      }
      theta[k][i] = state.dt * th;
      trial[i].centroid += state.dt * dc;
      trial[i].orientation = (exp_map(theta[k][i]) * state.poses[i].orientation).normalized();
    }
    StageVelocities sv;
    try {
      sv = velocities(state.t + tab.c[k] * state.dt, trial);
    } catch (const NonConvergence& e) {
      throw NonConvergence("stage " + std::to_string(k + 1) + ": " + e.what(), e.best_iterate, e.residual_history);
    }
    if (sv.v.size() != n || sv.omega.size() != n) throw ConsistencyError("stage velocities do not match the body count");
    kv[k] = sv.v;
    kw[k].resize(n);
    for (size_t i = 0; i < n; ++i) kw[k][i] = dexpinv(theta[k][i], sv.omega[i]);
    result.iterations += sv.iterations;
    result.residual = std::max(result.residual, sv.residual);
    if (k == 0) result.initial = sv;
  }
  for (size_t i = 0; i < n; ++i) {
    Vec3 dc = Vec3::Zero(), th = Vec3::Zero();
    for (int k = 0; k < s; ++k) {
      dc += tab.b[k] * kv[k][i];
      th += tab.b[k] * kw[k][i];
    }
    state.poses[i].centroid += state.dt * dc;
    state.poses[i].orientation = (exp_map(state.dt * th) * state.poses[i].orientation).normalized();
  }
  state.t += state.dt;
  return result;
}

}  // namespace rbs::dynamics
