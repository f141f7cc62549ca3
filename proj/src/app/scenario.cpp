#include "rbs/app/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbs/app/forcing.hpp"
#include "rbs/app/output.hpp"
#include "rbs/mobility/dense_reference.hpp"
#include "rbs/mobility/solver.hpp"

namespace rbs::app {

using surface::ParticleSurface;
using surface::Pose;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

StepProfile& StepProfile::operator+=(const StepProfile& o) {
  setup += o.setup;
  solve += o.solve;
  velocity += o.velocity;
  magnetics += o.magnetics;
  contact += o.contact;
  update += o.update;
  output += o.output;
  wall += o.wall;
  return *this;
}

StepProfile ProfileReport::mean() const {
  StepProfile m;
  for (const auto& s : steps) m += s;
  if (steps.empty()) return m;
  const double k = 1.0 / steps.size();
  m.setup *= k;
  m.solve *= k;
  m.velocity *= k;
  m.magnetics *= k;
  m.contact *= k;
  m.update *= k;
  m.output *= k;
  m.wall *= k;
  return m;
}

std::string ProfileReport::to_text() const {
  const StepProfile m = mean();
  std::ostringstream out;
  char line[128];
  out << "stage,seconds_per_step,fraction\n";
  auto row = [&](const char* name, double v) {
    std::snprintf(line, sizeof line, "%s,%.6g,%.4f\n", name, v, m.wall > 0 ? v / m.wall : 0.0);
    out << line;
  };
  row("setup", m.setup);
  row("solve", m.solve);
  row("velocity", m.velocity);
  row("magnetics", m.magnetics);
  row("contact", m.contact);
  row("update", m.update);
  row("output", m.output);
  row("wall", m.wall);
  std::snprintf(line, sizeof line, "block_build,%.6g,\nsteps,%zu,\n", block_build, steps.size());
  out << line;
  return out.str();
}

Simulation::Simulation(ScenarioConfig cfg, std::shared_ptr<const layers::FastSummation> provider)
    : cfg_(std::move(cfg)), ctx_(std::move(provider)) {
  if (cfg_.bodies.empty()) throw ConfigError("scenario needs at least one body");
  surface::ShapeLibrary library;
  try {
    if (!cfg_.shape_library.empty()) library = surface::ShapeLibrary::load(cfg_.shape_library);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  std::map<std::string, surface::ShapePtr> built;
  for (const auto& b : cfg_.bodies) {
    auto it = built.find(b.shape);
    if (it == built.end()) {
      try {
        it = built.emplace(b.shape, library.build(b.shape, cfg_.p)).first;
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("body shape: ") + e.what());
      } catch (const GeometryError& e) {
        throw ConfigError(std::string("body shape: ") + e.what());
      }
    }
    shapes_.push_back(it->second);
  }
  if (cfg_.forcing.type == ForcingSpec::Type::Swimmer && cfg_.bodies.size() != 3)
    throw ConfigError("swimmer forcing needs exactly 3 bodies");

  const auto bodies = surfaces(initial_poses());
  double h = 0.0;
  for (const auto& b : bodies) h = std::max(h, b.max_spacing());
  try {
    dynamics::detect_contacts(bodies, 2.0 * h);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("initial configuration: ") + e.what());
  }

  const auto t0 = Clock::now();
  for (const auto& s : built) {
    ctx_.blocks().get(s.second, layers::KernelTag::StokesTraction);
    if (cfg_.solver.preconditioner) ctx_.stokes_factor(s.second);
    if (cfg_.magnetics.enabled) ctx_.blocks().get(s.second, layers::KernelTag::LaplaceAdjointDouble);
  }
  block_build_ = since(t0);
}

std::vector<Pose> Simulation::initial_poses() const {
  std::vector<Pose> poses;
  for (const auto& b : cfg_.bodies) poses.push_back({b.centroid, b.orientation});
  return poses;
}

std::vector<ParticleSurface> Simulation::surfaces(const std::vector<Pose>& poses) const {
  if (poses.size() != shapes_.size()) throw ConsistencyError("pose count does not match the body count");
  std::vector<ParticleSurface> out;
  out.reserve(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) out.emplace_back(shapes_[i], poses[i]);
  return out;
}

StageOutput Simulation::evaluate(double t, const std::vector<Pose>& poses, const std::vector<dynamics::Contact>* contacts,
                                 StepProfile* profile) {
  StepProfile local;
  StepProfile& prof = profile ? *profile : local;
  StageOutput out;

  auto t0 = Clock::now();
  out.surfaces = surfaces(poses);
  const auto& bodies = out.surfaces;
  const Loads loads = evaluate_forcing(cfg_.forcing, cfg_.bodies, t);
  std::vector<PointSet> parts;
  for (size_t i = 0; i < bodies.size(); ++i)
    parts.push_back(mobility::incident_density(loads.forces[i], loads.torques[i], bodies[i]));
  VecX rho = mobility::stack_fields(parts);
  prof.update += since(t0);

  int iterations = 0;
  double residual = 0.0;
  if (cfg_.magnetics.enabled) {
    t0 = Clock::now();
    const VecX* q0 = last_q_.size() > 0 ? &last_q_ : nullptr;
    const auto pot = magnetics::solve_potential(bodies, cfg_.magnetics.field, ctx_, cfg_.solver, q0);
    const auto fields = magnetics::surface_fields(bodies, pot, cfg_.magnetics.field, ctx_, cfg_.solver.near);
    rho += magnetics::magnetic_incident_density(bodies, fields, cfg_.magnetics.field);
    last_q_ = pot.q;
    iterations += pot.iterations;
    residual = std::max(residual, pot.residual);
    prof.magnetics += since(t0);
  }

  t0 = Clock::now();
  const mobility::MobilitySystem system(bodies, ctx_, cfg_.solver);
  prof.setup += since(t0);
  t0 = Clock::now();
  const mobility::MobilitySolution sol = mobility::solve_with_incident(system, rho, cfg_.solver);
  prof.solve += since(t0) - sol.report.velocity_seconds;
  prof.velocity += sol.report.velocity_seconds;
  iterations += sol.report.iterations;
  residual = std::max(residual, sol.report.residual);
  out.total_density = sol.rho + sol.mu;

  const size_t n = bodies.size();
  out.velocities.v.resize(n);
  out.velocities.omega.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.velocities.v[i] = sol.kinetics[i].v;
    out.velocities.omega[i] = sol.kinetics[i].omega;
  }

  if (contacts && !contacts->empty()) {
    t0 = Clock::now();
    VecX V0(6 * n);
    for (size_t i = 0; i < n; ++i) V0.segment<6>(6 * i) << sol.kinetics[i].v, sol.kinetics[i].omega;
    std::vector<VecX> column_density;
    dynamics::MobilityMap map = [&](const VecX& loads6) {
      std::vector<PointSet> rp;
      for (size_t i = 0; i < n; ++i)
        rp.push_back(mobility::incident_density(loads6.segment<3>(6 * i), loads6.segment<3>(6 * i + 3), bodies[i]));
      const auto s = mobility::solve_with_incident(system, mobility::stack_fields(rp), cfg_.solver);
      iterations += s.report.iterations;
      residual = std::max(residual, s.report.residual);
      column_density.push_back(s.rho + s.mu);
      VecX V(6 * n);
      for (size_t i = 0; i < n; ++i) V.segment<6>(6 * i) << s.kinetics[i].v, s.kinetics[i].omega;
      return V;
    };
    const auto corr = dynamics::contact_forces(*contacts, bodies, V0, map);
    for (size_t i = 0; i < n; ++i) {
      out.velocities.v[i] = corr.velocities.segment<3>(6 * i);
      out.velocities.omega[i] = corr.velocities.segment<3>(6 * i + 3);
    }
    for (size_t k = 0; k < column_density.size(); ++k) out.total_density += corr.forces(k) * column_density[k];
    prof.contact += since(t0);
  }
  out.velocities.iterations = iterations;
  out.velocities.residual = residual;
  return out;
}

RunResult Simulation::run(const RunOptions& opts) {
  RunResult result;
  result.profile.block_build = block_build_;
  dynamics::SystemState state;
  state.poses = initial_poses();
  state.scheme = cfg_.stepping.scheme;
  state.dt = cfg_.stepping.dt;
  const int nsteps = static_cast<int>(std::llround(cfg_.stepping.t_final / cfg_.stepping.dt));
  last_q_.resize(0);

  if (cfg_.solver.dense_debug) {
    try {
      const auto ops = mobility::assemble_dense(surfaces(state.poses), cfg_.solver.near);
      result.condition_number = mobility::dense_condition_number(ops);
    } catch (const InvalidArgument&) {
      // Configurations beyond the dense limits simply get no report.
    }
  }

  std::ofstream traj;
  const bool files = opts.write_files && !opts.out_dir.empty();
  const bool dumps = files && (opts.dump_surfaces || cfg_.output.surfaces);
  if (files) {
    std::filesystem::create_directories(opts.out_dir);
    if (dumps) std::filesystem::create_directories(std::filesystem::path(opts.out_dir) / "surfaces");
    const std::string path = (std::filesystem::path(opts.out_dir) / cfg_.output.trajectory).string();
    traj.open(path);
    if (!traj) throw Error("cannot write trajectory file " + path);
    write_trajectory_header(traj);
  }

  double contact_delta = 0.0;
  if (cfg_.stepping.contact)
    contact_delta = cfg_.stepping.contact_delta ? *cfg_.stepping.contact_delta
                                                : dynamics::default_contact_delta(surfaces(state.poses));

  for (int k = 0; k < nsteps; ++k) {
    StepProfile prof;
    const auto wall0 = Clock::now();
    std::vector<dynamics::Contact> contacts;
    int stage = 0;
    try {
      if (cfg_.stepping.contact) {
        const auto c0 = Clock::now();
        contacts = dynamics::detect_contacts(surfaces(state.poses), contact_delta);
        prof.contact += since(c0);
      }
      double in_stages = 0.0;
      dynamics::StageFunction fn = [&](double t, const std::vector<Pose>& poses) {
        const auto e0 = Clock::now();
        StageOutput so = evaluate(t, poses, &contacts, &prof);
        if (stage++ == 0 && dumps && k % cfg_.output.surface_every == 0) {
          const auto o0 = Clock::now();
          char name[64];
          std::snprintf(name, sizeof name, "frame_%05d.vtk", k);
          write_vtk_surfaces((std::filesystem::path(opts.out_dir) / "surfaces" / name).string(), so.surfaces,
                             density_magnitude(so.total_density));
          prof.output += since(o0);
        }
        in_stages += since(e0);
        return so.velocities;
      };
      const auto s0 = Clock::now();
      const dynamics::StepResult sr = dynamics::step(state, fn);
      prof.update += since(s0) - in_stages;
      const auto o0 = Clock::now();
      for (size_t i = 0; i < state.poses.size(); ++i) {
        TrajectoryRecord r;
        r.t = state.t;
        r.body = static_cast<int>(i);
        r.centroid = state.poses[i].centroid;
        r.orientation = state.poses[i].orientation;
        r.v = sr.initial.v[i];
        r.omega = sr.initial.omega[i];
        r.iterations = sr.iterations;
        r.residual = sr.residual;
        result.records.push_back(r);
        if (traj.is_open()) write_trajectory_record(traj, r);
      }
      if (traj.is_open()) traj.flush();
      prof.output += since(o0);
    } catch (const NonConvergence& e) {
      throw SimulationError("step " + std::to_string(k) + " (t=" + std::to_string(state.t) + "), stage " +
                                std::to_string(stage) + ": " + e.what(),
                            k, true);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError("step " + std::to_string(k) + " (t=" + std::to_string(state.t) + "), stage " +
                                std::to_string(stage) + ": " + e.what(),
                            k, false);
    }
    prof.wall = since(wall0);
    result.profile.steps.push_back(prof);
  }
  result.final_poses = state.poses;
  result.t = state.t;
  result.steps = nsteps;

  if (files && (opts.profile || cfg_.output.profile)) {
    std::ofstream prof((std::filesystem::path(opts.out_dir) / "profile.csv").string());
    prof << result.profile.to_text();
  }
  return result;
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) { return Simulation(cfg).run(opts); }

}  // namespace rbs::app
