#include "rbs/app/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <regex>
#include <sstream>

#include "rbs/app/scenario.hpp"
#include "rbs/mobility/system.hpp"

namespace rbs::app {

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double exponent(double diff) {
  if (diff <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log2(diff);
}

std::vector<surface::Pose> final_poses(const ScenarioConfig& cfg) {
  RunOptions opts;
  opts.write_files = false;
  return Simulation(cfg).run(opts).final_poses;
}

ConvergenceRow compare(const std::string& label, const std::vector<surface::Pose>& a,
                       const std::vector<surface::Pose>& b) {
  double dc = 0.0, dr = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dc = std::max(dc, (a[i].centroid - b[i].centroid).norm());
    dr = std::max(dr, (a[i].rotation() - b[i].rotation()).norm());
  }
  return {label, exponent(dc), exponent(dr)};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

ConvergenceKind parse_convergence_kind(const std::string& s) {
  if (s == "spatial") return ConvergenceKind::Spatial;
  if (s == "temporal") return ConvergenceKind::Temporal;
  throw ConfigError("unknown convergence kind '" + s + "' (expected spatial or temporal)");
}

std::string to_string(ConvergenceKind k) { return k == ConvergenceKind::Spatial ? "spatial" : "temporal"; }

std::string harness_shape(const std::string& name) {
  if (name == "sphere") return "sphere(1)";
  static const std::regex ell(R"(ellipsoid-([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))");
  std::smatch m;
  if (std::regex_match(name, m, ell)) return "ellipsoid(" + m[1].str() + "," + m[1].str() + ",1)";
  return name;
}

ScenarioConfig swimmer_config(const std::string& shape, int p, dynamics::Scheme scheme, double dt, double t_final,
                              bool torques, double spacing) {
  ScenarioConfig cfg;
  cfg.p = p;
  for (int i = 0; i < 3; ++i) {
    BodySpec b;
    b.shape = harness_shape(shape);
    b.centroid = Vec3((i - 1) * spacing, 0.0, 0.0);
    cfg.bodies.push_back(b);
  }
  cfg.forcing.type = ForcingSpec::Type::Swimmer;
  cfg.forcing.swimmer_torques = torques;
  cfg.stepping.scheme = scheme;
  cfg.stepping.dt = dt;
  cfg.stepping.t_final = t_final;
  return cfg;
}

std::string ConvergenceTable::to_csv() const {
  std::ostringstream out;
  out << "shape,metric";
  for (const auto& r : rows) out << ',' << r.label;
  out << '\n' << shape << ",E_C";
  for (const auto& r : rows) out << ',' << fmt(r.E_C);
  out << '\n' << shape << ",E_R";
  for (const auto& r : rows) out << ',' << fmt(r.E_R);
  out << '\n';
  return out.str();
}

ConvergenceTable convergence_harness(ConvergenceKind kind, dynamics::Scheme scheme, const std::string& shape,
                                     const ConvergenceOptions& o) {
  const auto t0 = Clock::now();
  ConvergenceTable table;
  table.kind = kind;
  table.scheme = scheme;
  table.shape = shape;
  auto configure = [&](int p, int steps) {
    ScenarioConfig cfg = swimmer_config(shape, p, scheme, o.t_final / steps, o.t_final, o.torques, o.spacing);
    cfg.solver.tol = o.tol;
    cfg.solver.max_iter = 200;
    return cfg;
  };
  if (kind == ConvergenceKind::Spatial) {
    if (o.degrees.size() < 2) throw InvalidArgument("spatial convergence needs at least two degrees");
    std::vector<std::vector<surface::Pose>> finals;
    for (int p : o.degrees) finals.push_back(final_poses(configure(p, o.spatial_steps)));
    for (size_t k = 0; k + 1 < finals.size(); ++k)
      table.rows.push_back(compare("p=" + std::to_string(o.degrees[k]), finals[k], finals[k + 1]));
  } else {
    if (o.steps.size() < 2) throw InvalidArgument("temporal convergence needs at least two step counts");
    std::vector<std::vector<surface::Pose>> finals;
    for (int n : o.steps) finals.push_back(final_poses(configure(o.temporal_p, n)));
    for (size_t k = 0; k + 1 < finals.size(); ++k)
      table.rows.push_back(compare("dt=2pi/" + std::to_string(o.steps[k]), finals[k], finals[k + 1]));
  }
  table.seconds = since(t0);
  return table;
}

std::array<int, 3> lattice_dims(int n) {
  if (n < 1) throw InvalidArgument("lattice needs at least one body");
  std::array<int, 3> best{n, 1, 1};
  int spread = n;
  for (int a = 1; a <= n; ++a) {
    if (n % a) continue;
    for (int b = 1; b <= n / a; ++b) {
      if ((n / a) % b) continue;
      const int c = n / a / b;
      const int s = std::max({a, b, c}) - std::min({a, b, c});
      if (s < spread || (s == spread && std::array<int, 3>{a, b, c} > best)) {
        spread = s;
        best = {a, b, c};
      }
    }
  }
  return best;
}

std::vector<ScalingRow> scaling_harness(const std::vector<int>& ns, const std::vector<int>& ps,
                                        const ScalingOptions& o) {
  std::vector<ScalingRow> rows;
  for (int p : ps) {
    for (int n : ns) {
      const auto d = lattice_dims(n);
      ScenarioConfig cfg;
      cfg.p = p;
      cfg.bodies = lattice_bodies(o.shape, d[0], d[1], d[2], o.spacing);
      cfg.forcing.type = ForcingSpec::Type::Gravity;
      cfg.solver.tol = o.tol;
      cfg.stepping.scheme = dynamics::Scheme::Euler;
      cfg.stepping.dt = o.dt;
      cfg.stepping.t_final = o.dt * o.steps;

      Simulation sim(cfg);
      RunOptions ro;
      ro.write_files = false;
      const RunResult res = sim.run(ro);
      const StepProfile m = res.profile.mean();

      ScalingRow row;
      row.n = n;
      row.p = p;
      row.block_build = res.profile.block_build;
      row.setup = m.setup;
      row.solve = m.solve;
      row.velocity = m.velocity;
      row.update = m.update;
      row.total = m.wall;
      for (const auto& r : res.records) row.iterations = std::max(row.iterations, r.iterations);

      const auto bodies = sim.surfaces(sim.initial_poses());
      const mobility::MobilitySystem system(bodies, sim.context(), cfg.solver);
      const auto& op = system.traction_operator();
      row.nodes = static_cast<int>(op.size() / 3);
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      VecX mu(op.size());
      for (Eigen::Index k = 0; k < mu.size(); ++k) mu[k] = u(rng);
      row.inter_apply = row.self_apply = std::numeric_limits<double>::infinity();
      for (int r = 0; r < std::max(1, o.repeats); ++r) {
        auto t0 = Clock::now();
        const VecX a = op.apply_inter(mu);
        row.inter_apply = std::min(row.inter_apply, since(t0));
        t0 = Clock::now();
        const VecX b = op.apply_self(mu);
        row.self_apply = std::min(row.self_apply, since(t0));
        if (!a.allFinite() || !b.allFinite()) throw Error("non-finite operator output in scaling run");
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  out << "n,p,nodes,inter_apply,self_apply,block_build,setup,solve,velocity,update,total,solve_fraction,iterations\n";
  char line[512];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%d,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.4f,%d\n", r.n, r.p, r.nodes,
                  r.inter_apply, r.self_apply, r.block_build, r.setup, r.solve, r.velocity, r.update, r.total,
                  r.total > 0 ? r.solve / r.total : 0.0, r.iterations);
    out << line;
  }
  return out.str();
}

}  // namespace rbs::app
