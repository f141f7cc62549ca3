#include "rbs/mobility/solver.hpp"

#include <chrono>
#include <iostream>

#include "rbs/errors.hpp"

namespace rbs::mobility {

using surface::ParticleSurface;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

MobilitySolution solve_with_incident(const MobilitySystem& system, const VecX& rho, const SolverOptions& opts,
                                     const VecX* mu0) {
  const auto& bodies = system.bodies();
  if (rho.size() != system.size()) throw ConsistencyError("incident density size does not match the configuration");
  MobilitySolution sol;
  sol.rho = rho;

  const VecX b = system.rhs(rho);
  double apply_s = 0.0, prec_s = 0.0;
  LinearMap A = [&](const VecX& x) {
    const auto t0 = Clock::now();
    VecX y = system.apply_system(x);
    apply_s += seconds_since(t0);
    return y;
  };
  LinearMap M;
  if (opts.preconditioner) {
    M = [&](const VecX& x) {
      const auto t0 = Clock::now();
      VecX y = system.precondition(x);
      prec_s += seconds_since(t0);
      return y;
    };
  }
  const GmresResult g = gmres(A, b, {opts.tol, opts.max_iter}, M, mu0);
  sol.mu = g.x;
  sol.report.iterations = g.iterations;
  sol.report.residual = g.residual;
  sol.report.history = g.history;
  sol.report.apply_seconds = apply_s;
  sol.report.precondition_seconds = prec_s;

  const auto t0 = Clock::now();
  sol.u = system.single_layer(sol.rho + sol.mu);
  for (size_t i = 0; i < bodies.size(); ++i) {
    BodyKinetics k;
    const Moments m = apply_G(PointSet(body_field(rho, bodies, i)), bodies[i]);
    k.force = m.force;
    k.torque = m.torque;
    const RigidVelocity rv = extract_rigid_velocity(PointSet(body_field(sol.u, bodies, i)), bodies[i]);
    k.v = rv.v;
    k.omega = rv.omega;
    sol.kinetics.push_back(k);
  }
  sol.report.velocity_seconds = seconds_since(t0);
  return sol;
}

MobilitySolution solve_with_incident(const std::vector<ParticleSurface>& bodies, const VecX& rho, MobilityContext& ctx,
                                     const SolverOptions& opts, const VecX* mu0) {
  if (ctx.provider()->accuracy() > opts.tol)
    std::cerr << "warning: summation provider '" << ctx.provider()->name() << "' accuracy "
              << ctx.provider()->accuracy() << " is worse than the solver tolerance " << opts.tol << "\n";
  const auto t0 = Clock::now();
  const MobilitySystem system(bodies, ctx, opts);
  const double setup = seconds_since(t0);
  MobilitySolution sol = solve_with_incident(system, rho, opts, mu0);
  sol.report.setup_seconds = setup;
  return sol;
}

MobilitySolution solve_mobility(const std::vector<ParticleSurface>& bodies, const std::vector<Vec3>& forces,
                                const std::vector<Vec3>& torques, MobilityContext& ctx, const SolverOptions& opts) {
  if (forces.size() != bodies.size() || torques.size() != bodies.size())
    throw InvalidArgument("one force and one torque per body are required");
  std::vector<PointSet> rho;
  for (size_t i = 0; i < bodies.size(); ++i) rho.push_back(incident_density(forces[i], torques[i], bodies[i]));
  return solve_with_incident(bodies, stack_fields(rho), ctx, opts);
}

PointSet evaluate_velocity(const std::vector<ParticleSurface>& bodies, const VecX& density, const PointSet& targets,
                           const layers::NearOptions& opts) {
  for (Eigen::Index t = 0; t < targets.rows(); ++t)
    for (size_t i = 0; i < bodies.size(); ++i)
      if (layers::is_inside_or_on(bodies[i], targets.row(t).transpose(),
                                  std::max(opts.upsample, 4) * bodies[i].degree()))
        throw DomainError("velocity target " + std::to_string(t) + " lies on or inside body " + std::to_string(i));
  PointSet u = PointSet::Zero(targets.rows(), 3);
  for (size_t i = 0; i < bodies.size(); ++i) {
    const MatX d = PointSet(body_field(density, bodies, i));
    u += layers::evaluate_layer(layers::KernelTag::StokesSingle, bodies[i], d, targets, nullptr, opts);
  }
  return u;
}

}  // namespace rbs::mobility
