// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rbs/app/config.hpp"
#include "rbs/app/harness.hpp"
#include "rbs/dynamics/contact.hpp"
#include "rbs/errors.hpp"
#include "rbs/layers/self_block.hpp"
#include "rbs/magnetics/magnetics.hpp"
#include "rbs/mobility/dense_reference.hpp"
#include "rbs/mobility/solver.hpp"
#include "rbs/mobility/system.hpp"
#include "rbs/surface/shape.hpp"

using namespace rbs;
using layers::KernelTag;
using surface::ParticleSurface;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

VecX flatten(const PointSet& f) { return Eigen::Map<const VecX>(f.data(), f.size()); }

PointSet constant_field(int n, const Vec3& e) {
  PointSet f(n, 3);
  for (int i = 0; i < n; ++i) f.row(i) = e.transpose();
  return f;
}

PointSet rotation_field(const ParticleSurface& s, const Vec3& w) {
  PointSet f(s.node_count(), 3);
  for (int i = 0; i < s.node_count(); ++i) f.row(i) = w.cross(Vec3(s.positions().row(i)) - s.centroid()).transpose();
  return f;
}

std::vector<ParticleSurface> spheres(const std::vector<Vec3>& centers, int p) {
  const auto shape = surface::make_sphere(1.0, p);
  std::vector<ParticleSurface> out;
  for (const auto& c : centers) out.emplace_back(shape, c);
  return out;
}

mobility::SolverOptions options(double tol, int max_iter = 200) {
  mobility::SolverOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return o;
}

Outcome analytic_mobility() {
  const auto t0 = Clock::now();
  mobility::MobilityContext ctx;
  const auto b = spheres({Vec3(0.3, -0.1, 0.2)}, 8);
  const Vec3 F(1.0, -2.0, 0.5), T(-0.3, 0.7, 1.1);
  const auto s = mobility::solve_mobility(b, {F}, {T}, ctx, options(1e-12));
  const double ev = (s.kinetics[0].v - F / (6 * kPi)).norm() / (F / (6 * kPi)).norm();
  const double ew = (s.kinetics[0].omega - T / (8 * kPi)).norm() / (T / (8 * kPi)).norm();
  const double secs = seconds_since(t0);
  return {ev < 1e-8 && ew < 1e-8 && secs < 5.0,
          "rel err v " + fmt("%.2e", ev) + ", omega " + fmt("%.2e", ew) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome sphere_identities() {
  std::ostringstream d;
  bool ok = true;
  const char* names[3] = {"S[e]", "S[e3 x x]", "S_L[1]"};
  for (int which = 0; which < 3; ++which) {
    double err[3];
    const int ps[3] = {4, 8, 16};
    for (int k = 0; k < 3; ++k) {
      const auto s = spheres({Vec3::Zero()}, ps[k])[0];
      const int n = s.node_count();
      if (which == 0) {
        const auto B = layers::singular_self_matrix(s, KernelTag::StokesSingle);
        const Vec3 e = Vec3(1, -2, 0.5).normalized();
        err[k] = (B.apply(flatten(constant_field(n, e))) - flatten(constant_field(n, 2.0 / 3.0 * e))).cwiseAbs().maxCoeff();
      } else if (which == 1) {
        const auto B = layers::singular_self_matrix(s, KernelTag::StokesSingle);
        const VecX r = flatten(rotation_field(s, Vec3::UnitZ()));
        err[k] = (B.apply(r) - r / 3.0).cwiseAbs().maxCoeff();
      } else {
        const auto B = layers::singular_self_matrix(s, KernelTag::LaplaceSingle);
        err[k] = (B.apply(VecX::Ones(n)).array() - 1.0).abs().maxCoeff();
      }
    }
    ok = ok && err[0] < 1e-4 && err[1] < 1e-8 && err[1] <= std::max(err[0], 1e-13) && err[2] <= std::max(err[1], 1e-13);
    d << names[which] << " " << fmt("%.1e", err[0]) << "/" << fmt("%.1e", err[1]) << "/" << fmt("%.1e", err[2]) << "; ";
  }
  return {ok, d.str() + "(p=4/8/16)"};
}

Outcome nullspace() {
  const auto s = spheres({Vec3::Zero()}, 8)[0];
  const auto K = layers::singular_self_matrix(s, KernelTag::StokesTraction);
  double worst = 0.0;
  for (int d = 0; d < 3; ++d) {
    for (const VecX& mu : {flatten(constant_field(s.node_count(), Vec3::Unit(d))),
                           flatten(rotation_field(s, Vec3::Unit(d)))})
      worst = std::max(worst, (0.5 * mu + K.apply(mu)).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-8, "max |(1/2 I + K) mu| = " + fmt("%.2e", worst)};
}

Outcome constraint() {
  const double tol = 1e-8;
  mobility::MobilityContext ctx;
  const auto ell = surface::make_ellipsoid(1.0, 0.6, 0.6, 8);
  const auto tri = surface::make_ellipsoid(1.0, 0.8, 0.5, 8);
  std::vector<std::vector<ParticleSurface>> cases;
  cases.push_back({ParticleSurface(ell, Vec3::Zero())});
  cases.push_back({ParticleSurface(ell, Vec3::Zero()), ParticleSurface(ell, Vec3(0, 2.8, 0))});
  cases.push_back({ParticleSurface(tri, Vec3::Zero(), Quat(Eigen::AngleAxisd(0.4, Vec3(1, 1, 0).normalized()))),
                   ParticleSurface(tri, Vec3(2.4, 0.3, 0)), ParticleSurface(tri, Vec3(0.5, 2.2, 1.0))});
  cases.push_back(spheres({Vec3::Zero(), Vec3(2.2, 0, 0), Vec3(4.4, 0.2, 0), Vec3(1.1, 2.0, 0)}, 8));
  double worst = 0.0;
  for (const auto& b : cases) {
    std::vector<Vec3> F, T;
    for (size_t i = 0; i < b.size(); ++i) {
      F.emplace_back(std::cos(i + 1.0), -0.5, 1.0);
      T.emplace_back(0.2, std::sin(i + 2.0), -0.3);
    }
    const auto s = mobility::solve_mobility(b, F, T, ctx, options(tol));
    size_t off = 0;
    for (const auto& body : b) {
      const PointSet mu = Eigen::Map<const PointSet>(s.mu.data() + off, body.node_count(), 3);
      const auto m = mobility::apply_G(mu, body);
      worst = std::max({worst, m.force.norm(), m.torque.norm()});
      off += 3 * body.node_count();
    }
  }
  return {worst < 10 * tol, "max scattered moment " + fmt("%.2e", worst) + " (tol " + fmt("%.0e", tol) + ")"};
}

Outcome conditioning() {
  mobility::MobilityContext ctx;
  const auto bl = app::lattice_bodies("sphere(1)", 2, 2, 2, 5.0);
  std::vector<Vec3> centers, F, T;
  for (const auto& b : bl) {
    centers.push_back(b.centroid);
    F.emplace_back(0, 0, -1);
    T.emplace_back(Vec3::Zero());
  }
  const auto s = mobility::solve_mobility(spheres(centers, 8), F, T, ctx, options(1e-6));
  return {s.report.residual <= 1e-6 && s.report.iterations <= 10,
          "GMRES iterations " + std::to_string(s.report.iterations) + " (p=8, tol 1e-6)"};
}

std::vector<double> increments(const app::ConvergenceTable& t, bool rotation = false) {
  std::vector<double> d;
  for (size_t k = 1; k < t.rows.size(); ++k)
    d.push_back(rotation ? t.rows[k].E_R - t.rows[k - 1].E_R : t.rows[k].E_C - t.rows[k - 1].E_C);
  return d;
}

std::string row_text(const app::ConvergenceTable& t, bool rotation = false) {
  std::ostringstream o;
  for (const auto& r : t.rows) o << fmt("%.2f", rotation ? r.E_R : r.E_C) << " ";
  return o.str();
}

Outcome temporal_orders() {
  app::ConvergenceOptions o;
  o.steps = {16, 32, 64, 128, 256};
  o.temporal_p = 8;
  const auto rk = app::convergence_harness(app::ConvergenceKind::Temporal, dynamics::Scheme::RK4, "sphere", o);
  const auto he = app::convergence_harness(app::ConvergenceKind::Temporal, dynamics::Scheme::Heun, "sphere", o);
  bool ok = rk.seconds < 600 && he.seconds < 600;
  std::ostringstream d;
  const std::pair<const char*, const app::ConvergenceTable*> runs[2] = {{"rk4", &rk}, {"heun", &he}};
  for (const auto& [name, t] : runs) {
    const double order = t == &rk ? 4.0 : 2.0, slack = t == &rk ? 0.5 : 0.8;
    for (bool rot : {false, true}) {
      d << name << (rot ? " E_R " : " E_C ") << row_text(*t, rot) << "incr";
      for (double x : increments(*t, rot)) {
        ok = ok && std::abs(x - order) <= slack;
        d << " " << fmt("%.2f", x);
      }
      d << "; ";
    }
    d << name << " " << fmt("%.0f", t->seconds) << " s; ";
  }
  return {ok, d.str()};
}

Outcome spatial_convergence() {
  app::ConvergenceOptions o;
  o.degrees = {2, 4, 8, 16};
  const auto t = app::convergence_harness(app::ConvergenceKind::Spatial, dynamics::Scheme::Euler, "sphere", o);
  const auto d = increments(t);
  bool ok = t.rows.size() == 3 && d.size() == 2;
  // Strictly increasing with growing increments across p = 2, 4, 8.
  for (double x : d) ok = ok && x > 0.0;
  ok = ok && d.size() == 2 && d[1] > d[0];
  return {ok, "E_C(p=2,4,8) " + row_text(t) + "(" + fmt("%.0f", t.seconds) + " s)"};
}

Outcome equivalence() {
  mobility::MobilityContext ctx;
  const auto b = spheres({Vec3::Zero(), Vec3(4, 0.5, 0)}, 4);
  const std::vector<Vec3> F{Vec3(0, 0, -1), Vec3(1, 0, 0.5)}, T{Vec3(0, 0.2, 0), Vec3(-0.1, 0, 0)};
  const auto o = options(1e-13);
  const auto a = mobility::solve_mobility(b, F, T, ctx, o);
  const auto d = mobility::dense_solve(b, F, T);
  double diff = 0.0;
  for (int i = 0; i < 2; ++i)
    diff = std::max({diff, (a.kinetics[i].v - d.kinetics[i].v).norm(), (a.kinetics[i].omega - d.kinetics[i].omega).norm()});
  const MatX M = mobility::grand_mobility_matrix(b, ctx, o);
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  const double lmin = Eigen::SelfAdjointEigenSolver<MatX>(0.5 * (M + M.transpose())).eigenvalues().minCoeff();
  return {diff < 1e-8 && asym < 1e-7 && lmin > 0.0,
          "dense vs matrix-free " + fmt("%.2e", diff) + ", asymmetry " + fmt("%.2e", asym) + ", min eig " +
              fmt("%.3e", lmin) + " (centers 4.03 apart)"};
}

Outcome magnetics_oracles() {
  mobility::MobilityContext ctx;
  magnetics::MagneticConfig cfg;
  cfg.H0 = Vec3::UnitZ();
  cfg.mu_ratio = 2.0;
  const auto one = spheres({Vec3::Zero()}, 8);
  const auto sol = magnetics::solve_potential(one, cfg, ctx, options(1e-12));
  PointSet in(2, 3);
  in << 0, 0, 0, 0.3, -0.2, 0.4;
  const PointSet H = magnetics::magnetic_field(one, sol, cfg, in, magnetics::Side::Interior);
  const double ein = std::max((H.row(0).transpose() - Vec3(0, 0, 0.75)).norm(), (H.row(1).transpose() - Vec3(0, 0, 0.75)).norm());

  auto pair_forces = [&](const std::vector<ParticleSurface>& b, const magnetics::MagneticConfig& c) {
    const auto q = magnetics::solve_potential(b, c, ctx, options(1e-12));
    const auto f = magnetics::surface_fields(b, q, c, ctx);
    return magnetics::magnetic_moments(b, magnetics::magnetic_incident_density(b, f, c));
  };
  magnetics::MagneticConfig tilt = cfg;
  tilt.H0 = Vec3(0, 0.6, 0.8);
  const Vec3 r(8, 0, 0);
  const auto far = pair_forces(spheres({Vec3::Zero(), r}, 8), tilt);
  const Vec3 m = magnetics::sphere_dipole_moment(tilt, 1.0);
  const Vec3 Fd = magnetics::dipole_pair_force(m, m, r);
  const double efar = (far[1].force - Fd).norm() / Fd.norm();

  const auto near = spheres({Vec3::Zero(), Vec3(3, 0, 0)}, 8);
  const auto perp = pair_forces(near, cfg);
  magnetics::MagneticConfig par = cfg;
  par.H0 = Vec3::UnitX();
  const auto para = pair_forces(near, par);
  const bool repel = perp[0].force.x() < 0 && perp[1].force.x() > 0;
  const bool attract = para[0].force.x() > 0 && para[1].force.x() < 0;
  return {ein < 1e-6 && efar < 0.05 && repel && attract,
          "interior err " + fmt("%.2e", ein) + ", far-pair rel err " + fmt("%.3f", efar) +
              (repel ? ", perpendicular repels" : ", perpendicular does not repel") +
              (attract ? ", parallel attracts" : ", parallel does not attract")};
}

Outcome contact_corrector() {
  mobility::MobilityContext ctx;
  const auto b = spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}, 8);
  const auto c = dynamics::detect_contacts(b, 0.1);
  if (c.size() != 1) return {false, "expected one contact, found " + std::to_string(c.size())};
  const dynamics::MobilityMap M = [&](const VecX& loads) {
    const auto s = mobility::solve_mobility(b, {loads.segment<3>(0), loads.segment<3>(6)},
                                            {loads.segment<3>(3), loads.segment<3>(9)}, ctx, options(1e-12));
    VecX V(12);
    V << s.kinetics[0].v, s.kinetics[0].omega, s.kinetics[1].v, s.kinetics[1].omega;
    return V;
  };
  VecX loads = VecX::Zero(12);
  loads.segment<3>(0) = Vec3(1, 0, 0);
  loads.segment<3>(6) = Vec3(-1, 0, 0);
  const VecX V0 = M(loads);
  const auto corr = dynamics::contact_forces(c, b, V0, M);
  const MatX D = dynamics::contact_velocity_map(c, b);
  const double before = std::abs((D * V0).dot(c[0].normal));
  const double after = std::abs((D * corr.velocities).dot(c[0].normal));
  return {after < 1e-8, "relative normal velocity " + fmt("%.2e", before) + " -> " + fmt("%.2e", after)};
}

Outcome scaling() {
  app::ScalingOptions o;
  o.repeats = 5;
  const auto rows = app::scaling_harness({8, 16}, {8}, o);
  const double ratio = rows[1].inter_apply / rows[0].inter_apply;
  const double frac = rows[0].solve / rows[0].total;
  return {std::abs(ratio - 4.0) <= 1.0 && frac > 0.5,
          "inter-body apply n=8 " + fmt("%.4f", rows[0].inter_apply) + " s, n=16 " + fmt("%.4f", rows[1].inter_apply) +
              " s, ratio " + fmt("%.2f", ratio) + "; solve fraction (2x2x2) " + fmt("%.2f", frac)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic sphere mobility", analytic_mobility},
      {"singular quadrature sphere identities", sphere_identities},
      {"rigid nullspace of 1/2 I + K", nullspace},
      {"scattered density carries no moments", constraint},
      {"preconditioned GMRES on 2x2x2 lattice", conditioning},
      {"temporal orders of rk4 and heun", temporal_orders},
      {"spatial spectral convergence", spatial_convergence},
      {"dense equivalence and reciprocity", equivalence},
      {"magnetics oracles", magnetics_oracles},
      {"contact corrector", contact_corrector},
      {"direct-provider scaling and solve dominance", scaling},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << (k + 1) << " " << criteria[k].first << ": " << r.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
