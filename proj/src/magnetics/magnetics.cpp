#include "rbs/magnetics/magnetics.hpp"

#include <cmath>

#include "rbs/errors.hpp"
#include "rbs/mobility/gmres.hpp"

namespace rbs::magnetics {

using layers::KernelTag;
using surface::ParticleSurface;

void MagneticConfig::validate() const {
  if (!(mu_ratio > 0.0) || !std::isfinite(mu_ratio)) throw InvalidArgument("mu_ratio must be positive");
  if (!H0.allFinite()) throw InvalidArgument("imposed field must be finite");
}

namespace {

std::vector<Eigen::Index> scalar_offsets(const std::vector<ParticleSurface>& bodies) {
  std::vector<Eigen::Index> off(bodies.size() + 1, 0);
  for (size_t i = 0; i < bodies.size(); ++i) off[i + 1] = off[i] + bodies[i].node_count();
  return off;
}

}  // namespace

PotentialSolution solve_potential(const std::vector<ParticleSurface>& bodies, const MagneticConfig& cfg,
                                  mobility::MobilityContext& ctx, const mobility::SolverOptions& opts, const VecX* q0) {
  cfg.validate();
  const double eta = cfg.eta();
  const auto off = scalar_offsets(bodies);
  VecX b(off.back());
  for (size_t i = 0; i < bodies.size(); ++i)
    b.segment(off[i], bodies[i].node_count()) = eta * (bodies[i].normals() * cfg.H0);

  PotentialSolution sol;
  if (eta == 0.0 || b.norm() == 0.0) {
    sol.q = VecX::Zero(off.back());
    return sol;
  }
  const layers::InteractionOperator KL(bodies, KernelTag::LaplaceAdjointDouble, ctx.blocks(), ctx.provider(), opts.near);
  std::vector<std::shared_ptr<const Eigen::PartialPivLU<MatX>>> factors;
  if (opts.preconditioner)
    for (const auto& body : bodies) factors.push_back(ctx.laplace_factor(body.shape(), eta));

  mobility::LinearMap A = [&](const VecX& q) { return VecX(0.5 * q + eta * KL.apply(q)); };
  mobility::LinearMap M;
  if (!factors.empty()) {
    M = [&](const VecX& r) {
      VecX z(r.size());
      for (size_t i = 0; i < bodies.size(); ++i)
        z.segment(off[i], bodies[i].node_count()) = factors[i]->solve(r.segment(off[i], bodies[i].node_count()));
      return z;
    };
  }
  const mobility::GmresResult g = mobility::gmres(A, b, {opts.tol, opts.max_iter}, M, q0);
  sol.q = g.x;
  sol.iterations = g.iterations;
  sol.residual = g.residual;
  sol.history = g.history;
  return sol;
}

SurfaceFields surface_fields(const std::vector<ParticleSurface>& bodies, const PotentialSolution& sol,
                             const MagneticConfig& cfg, mobility::MobilityContext& ctx, const layers::NearOptions& opts) {
  const auto off = scalar_offsets(bodies);
  if (sol.q.size() != off.back()) throw ConsistencyError("charge density does not match the configuration");
  const layers::InteractionOperator SL(bodies, KernelTag::LaplaceSingle, ctx.blocks(), ctx.provider(), opts);
  const layers::InteractionOperator KL(bodies, KernelTag::LaplaceAdjointDouble, ctx.blocks(), ctx.provider(), opts);
  const VecX phi = SL.apply(sol.q);
  const VecX kq = KL.apply(sol.q);
  SurfaceFields out;
  for (size_t i = 0; i < bodies.size(); ++i) {
    const int m = bodies[i].node_count();
    const VecX ph = phi.segment(off[i], m);
    const VecX k = kq.segment(off[i], m);
    const VecX q = sol.q.segment(off[i], m);
    const PointSet grad = surface::surface_gradient(ph, bodies[i]);
    const PointSet& n = bodies[i].normals();
    PointSet hp(m, 3), hm(m, 3);
    for (int l = 0; l < m; ++l) {
      const Eigen::RowVector3d base = cfg.H0.transpose() - grad.row(l);
      hp.row(l) = base - (k(l) - 0.5 * q(l)) * n.row(l);
      hm.row(l) = base - (k(l) + 0.5 * q(l)) * n.row(l);
    }
    out.H_plus.push_back(hp);
    out.H_minus.push_back(hm);
    out.phi_s.push_back(ph);
    out.KLq.push_back(k);
  }
  return out;
}

PointSet magnetic_field(const std::vector<ParticleSurface>& bodies, const PotentialSolution& sol, const MagneticConfig& cfg,
                        const PointSet& targets, Side side, const layers::NearOptions& opts) {
  const auto off = scalar_offsets(bodies);
  if (sol.q.size() != off.back()) throw ConsistencyError("charge density does not match the configuration");
  // owner[t]: the body enclosing target t, or -1.
  std::vector<int> owner(targets.rows(), -1);
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    if (side == Side::OffSurface) break;
    for (size_t i = 0; i < bodies.size() && owner[t] < 0; ++i)
      if (layers::is_inside_or_on(bodies[i], targets.row(t).transpose())) owner[t] = static_cast<int>(i);
    if (side == Side::Exterior && owner[t] >= 0)
      throw DomainError("exterior field target " + std::to_string(t) + " lies inside a body");
    if (side == Side::Interior && owner[t] < 0)
      throw DomainError("interior field target " + std::to_string(t) + " lies outside every body");
  }
  PointSet H(targets.rows(), 3);
  H.rowwise() = cfg.H0.transpose();
  for (size_t i = 0; i < bodies.size(); ++i) {
    const MatX q = sol.q.segment(off[i], bodies[i].node_count());
    std::vector<Eigen::Index> in, out;
    for (Eigen::Index t = 0; t < targets.rows(); ++t) (owner[t] == static_cast<int>(i) ? in : out).push_back(t);
    for (int pass = 0; pass < 2; ++pass) {
      const auto& idx = pass == 0 ? out : in;
      if (idx.empty()) continue;
      PointSet x(static_cast<Eigen::Index>(idx.size()), 3);
      for (size_t k = 0; k < idx.size(); ++k) x.row(k) = targets.row(idx[k]);
      const MatX g = pass == 0 ? layers::evaluate_layer(KernelTag::LaplaceGradient, bodies[i], q, x, nullptr, opts)
                               : layers::evaluate_layer_inside(KernelTag::LaplaceGradient, bodies[i], q, x, nullptr, opts);
      for (size_t k = 0; k < idx.size(); ++k) H.row(idx[k]) -= g.row(k);
    }
  }
  return H;
}

PointSet maxwell_traction(const PointSet& H_plus, const PointSet& H_minus, const PointSet& normals, double mu_ratio) {
  if (H_plus.rows() != normals.rows() || H_minus.rows() != normals.rows())
    throw InvalidArgument("field and normal sample counts differ");
  PointSet rho(normals.rows(), 3);
  for (Eigen::Index l = 0; l < normals.rows(); ++l) {
    const Vec3 n = normals.row(l).transpose();
    const Vec3 hp = H_plus.row(l).transpose(), hm = H_minus.row(l).transpose();
    const Vec3 tp = hp * hp.dot(n) - 0.5 * hp.squaredNorm() * n;
    const Vec3 tm = hm * hm.dot(n) - 0.5 * hm.squaredNorm() * n;
    rho.row(l) = (tp - mu_ratio * tm).transpose();
  }
  return rho;
}

VecX magnetic_incident_density(const std::vector<ParticleSurface>& bodies, const SurfaceFields& fields,
                               const MagneticConfig& cfg) {
  std::vector<PointSet> parts;
  for (size_t i = 0; i < bodies.size(); ++i)
    parts.push_back(maxwell_traction(fields.H_plus[i], fields.H_minus[i], bodies[i].normals(), cfg.mu_ratio));
  return mobility::stack_fields(parts);
}

std::vector<mobility::Moments> magnetic_moments(const std::vector<ParticleSurface>& bodies, const VecX& incident) {
  std::vector<mobility::Moments> out;
  for (size_t i = 0; i < bodies.size(); ++i)
    out.push_back(mobility::apply_G(PointSet(mobility::body_field(incident, bodies, i)), bodies[i]));
  return out;
}

MagneticStepResult magnetic_mobility_step(const std::vector<ParticleSurface>& bodies, const MagneticConfig& cfg,
                                          mobility::MobilityContext& ctx, const mobility::SolverOptions& opts,
                                          const VecX* q0, const VecX* mu0) {
  MagneticStepResult out;
  out.potential = solve_potential(bodies, cfg, ctx, opts, q0);
  const SurfaceFields fields = surface_fields(bodies, out.potential, cfg, ctx, opts.near);
  const VecX rho = magnetic_incident_density(bodies, fields, cfg);
  out.mobility = mobility::solve_with_incident(bodies, rho, ctx, opts, mu0);
  return out;
}

Vec3 sphere_dipole_moment(const MagneticConfig& cfg, double radius) {
  const double beta = (cfg.mu_ratio - 1.0) / (cfg.mu_ratio + 2.0);
  return 4.0 * kPi * beta * radius * radius * radius * cfg.H0;
}

Vec3 dipole_pair_force(const Vec3& m1, const Vec3& m2, const Vec3& r) {
  const double d = r.norm();
  const Vec3 e = r / d;
  const double a = m1.dot(e), b = m2.dot(e);
  return 3.0 / (4.0 * kPi * std::pow(d, 4)) * (a * m2 + b * m1 + m1.dot(m2) * e - 5.0 * a * b * e);
}

}  // namespace rbs::magnetics
