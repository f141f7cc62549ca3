#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rbs/errors.hpp"
#include "rbs/layers/self_block.hpp"
#include "rbs/mobility/dense_reference.hpp"
#include "rbs/mobility/gmres.hpp"
#include "rbs/mobility/solver.hpp"
#include "rbs/mobility/system.hpp"
#include "rbs/surface/shape.hpp"

using namespace rbs;
using namespace rbs::mobility;
using surface::ParticleSurface;

namespace {

ParticleSurface unit_sphere(int p, const Vec3& c = Vec3::Zero()) {
  return ParticleSurface(surface::make_sphere(1.0, p), c);
}

VecX flatten(const PointSet& f) { return Eigen::Map<const VecX>(f.data(), f.size()); }

PointSet constant_field(int n, const Vec3& e) {
  PointSet f(n, 3);
  for (int i = 0; i < n; ++i) f.row(i) = e.transpose();
  return f;
}

PointSet rotlet(const ParticleSurface& s, const Vec3& w) {
  PointSet f(s.node_count(), 3);
  for (int i = 0; i < s.node_count(); ++i) f.row(i) = w.cross(Vec3(s.positions().row(i)) - s.centroid()).transpose();
  return f;
}

double max_abs(const PointSet& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Gmres, Identity) {
  const VecX b = VecX::LinSpaced(5, 1, 5);
  const GmresResult r = gmres([](const VecX& x) { return x; }, b);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT((r.x - b).norm(), 1e-14);
}

TEST(Gmres, DiagonalTerminatesInThreeIterations) {
  const Eigen::Vector3d d(1, 2, 4);
  GmresOptions o;
  o.tol = 1e-12;
  const GmresResult r = gmres([&](const VecX& x) { return VecX(d.cwiseProduct(x)); }, VecX(d), o);
  EXPECT_LE(r.iterations, 3);
  EXPECT_LT((r.x - VecX::Ones(3)).norm(), 1e-12);
}

TEST(Gmres, RandomSpdMatchesDirectSolve) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  MatX B(20, 20);
  for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = g(rng);
  const MatX A = B * B.transpose() + 20 * MatX::Identity(20, 20);
  VecX b(20);
  for (int i = 0; i < 20; ++i) b[i] = g(rng);
  GmresOptions o;
  o.tol = 1e-12;
  o.max_iter = 40;
  const GmresResult r = gmres([&](const VecX& x) { return VecX(A * x); }, b, o);
  EXPECT_LT((r.x - A.ldlt().solve(b)).norm(), 1e-10 * b.norm());
  EXPECT_EQ(r.history.size(), static_cast<size_t>(r.iterations + 1));
}

TEST(Gmres, ZeroRightHandSideAndFailure) {
  const GmresResult z = gmres([](const VecX& x) { return x; }, VecX::Zero(4));
  EXPECT_EQ(z.x.norm(), 0.0);
  GmresOptions o;
  o.max_iter = 2;
  o.tol = 1e-14;
  const MatX A = MatX::Random(10, 10) + 3 * MatX::Identity(10, 10);
  EXPECT_THROW(gmres([&](const VecX& x) { return VecX(A * x); }, VecX::Ones(10), o), NonConvergence);
}

TEST(Incident, SphereDensities) {
  const ParticleSurface s = unit_sphere(6, Vec3(1, 2, 3));
  const PointSet a = incident_density(Vec3(0, 0, -4 * kPi), Vec3::Zero(), s);
  EXPECT_LT(max_abs(a - constant_field(s.node_count(), -Vec3::UnitZ())), 1e-12);
  const PointSet b = incident_density(Vec3::Zero(), Vec3(0, 0, 8 * kPi / 3), s);
  EXPECT_LT(max_abs(b - rotlet(s, Vec3::UnitZ())), 1e-12);
  EXPECT_EQ(max_abs(incident_density(Vec3::Zero(), Vec3::Zero(), s)), 0.0);
}

TEST(Incident, MomentsReproduceLoads) {
  const ParticleSurface s(surface::make_ellipsoid(1, 0.6, 0.4, 8), Vec3(0.2, 0, 1),
                          Quat(Eigen::AngleAxisd(0.5, Vec3::UnitX())));
  const Vec3 F(1, -2, 0.5), T(0.3, 0.1, -0.7);
  const Moments m = apply_G(incident_density(F, T, s), s);
  EXPECT_LT((m.force - F).norm(), 1e-12);
  EXPECT_LT((m.torque - T).norm(), 1e-12);
}

TEST(Moments, SphereExamples) {
  const ParticleSurface s = unit_sphere(8);
  const int n = s.node_count();
  const Moments a = apply_G(constant_field(n, Vec3::UnitX()), s);
  EXPECT_LT((a.force - 4 * kPi * Vec3::UnitX()).norm(), 1e-12);
  EXPECT_LT(a.torque.norm(), 1e-13);
  const Moments b = apply_G(rotlet(s, Vec3::UnitZ()), s);
  EXPECT_LT(b.force.norm(), 1e-13);
  EXPECT_LT((b.torque - 8 * kPi / 3 * Vec3::UnitZ()).norm(), 1e-12);
  PointSet odd = PointSet::Zero(n, 3);
  odd.col(0) = s.positions().col(0);
  EXPECT_LT(apply_G(odd, s).force.norm(), 1e-13);
}

TEST(LOperator, SphereExamples) {
  const ParticleSurface s = unit_sphere(8);
  const int n = s.node_count();
  EXPECT_LT(max_abs(apply_L(constant_field(n, Vec3::UnitX()), s) - constant_field(n, 4 * kPi * Vec3::UnitX())), 1e-12);
  EXPECT_LT(max_abs(apply_L(rotlet(s, Vec3::UnitZ()), s) - 8 * kPi / 3 * rotlet(s, Vec3::UnitZ())), 1e-12);
  EXPECT_EQ(max_abs(apply_L(PointSet::Zero(n, 3), s)), 0.0);
  const VecX mu = VecX::Random(3 * n);
  EXPECT_LT((L_matrix(s) * mu - flatten(apply_L(PointSet(Eigen::Map<const PointSet>(mu.data(), n, 3)), s))).norm(),
            1e-12);
}

TEST(RigidVelocity, RoundTrips) {
  const ParticleSurface s = unit_sphere(6, Vec3(0.5, 0.5, -1));
  PointSet u = rotlet(s, Vec3::UnitZ());
  for (int i = 0; i < s.node_count(); ++i) u.row(i) += Vec3(1, 2, 3).transpose();
  const RigidVelocity r = extract_rigid_velocity(u, s);
  EXPECT_LT((r.v - Vec3(1, 2, 3)).norm(), 1e-12);
  EXPECT_LT((r.omega - Vec3::UnitZ()).norm(), 1e-12);
  const RigidVelocity z = extract_rigid_velocity(PointSet::Zero(s.node_count(), 3), s);
  EXPECT_EQ(z.v.norm() + z.omega.norm(), 0.0);
  const ParticleSurface e(surface::make_ellipsoid(1, 0.5, 0.5, 8), Vec3(1, 0, 0));
  const Vec3 w = Vec3(1, 1, 1).normalized();
  const RigidVelocity re = extract_rigid_velocity(rotlet(e, w), e);
  EXPECT_LT((re.omega - w).norm(), 1e-12);
  EXPECT_LT(re.v.norm(), 1e-12);
}

TEST(System, SphereApplications) {
  MobilityContext ctx;
  const std::vector<ParticleSurface> bodies{unit_sphere(8)};
  const MobilitySystem sys(bodies, ctx);
  const int n = bodies[0].node_count();
  const VecX e1 = flatten(constant_field(n, Vec3::UnitX()));
  EXPECT_LT((sys.apply_system(e1) - 4 * kPi * e1).cwiseAbs().maxCoeff(), 1e-8);
  const VecX r = flatten(rotlet(bodies[0], Vec3::UnitZ()));
  EXPECT_LT((sys.apply_system(r) - 8 * kPi / 3 * r).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(sys.apply_system(VecX::Zero(3 * n)).norm(), 0.0);
  EXPECT_LT(sys.rhs(e1).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(sys.rhs(r).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(sys.rhs(VecX::Zero(3 * n)).norm(), 0.0);
}

TEST(System, PreconditionerInvertsSingleBody) {
  MobilityContext ctx;
  const std::vector<ParticleSurface> bodies{ParticleSurface(surface::make_ellipsoid(1, 0.7, 0.5, 6), Vec3(0, 1, 0),
                                                            Quat(Eigen::AngleAxisd(1.0, Vec3::UnitZ())))};
  const MobilitySystem sys(bodies, ctx);
  const VecX mu = VecX::Random(sys.size());
  EXPECT_LT((sys.precondition(sys.apply_system(mu)) - mu).norm(), 1e-10 * mu.norm());
  const VecX rho = flatten(incident_density(Vec3(1, 0, 0), Vec3(0, 1, 0), bodies[0]));
  SolverOptions o;
  o.tol = 1e-10;
  const MobilitySolution sol = solve_with_incident(sys, rho, o);
  EXPECT_LE(sol.report.iterations, 2);
  const std::vector<ParticleSurface> moved{unit_sphere(6, Vec3(1, 1, 1))};
  EXPECT_THROW(sys.check_poses(moved), ConsistencyError);
}

TEST(System, FarPairIterations) {
  MobilityContext ctx;
  const auto shape = surface::make_sphere(1.0, 8);
  const std::vector<ParticleSurface> bodies{ParticleSurface(shape, Vec3::Zero()), ParticleSurface(shape, Vec3(10, 0, 0))};
  const MobilitySolution sol = solve_mobility(bodies, {Vec3(0, 0, -1), Vec3(1, 0, 0)}, {Vec3::Zero(), Vec3(0, 0, 1)}, ctx);
  EXPECT_LE(sol.report.iterations, 5);
}

TEST(Solve, StokesDragAndRotation) {
  MobilityContext ctx;
  const std::vector<ParticleSurface> bodies{unit_sphere(8)};
  SolverOptions o;
  o.tol = 1e-10;
  const MobilitySolution a = solve_mobility(bodies, {6 * kPi * Vec3::UnitX()}, {Vec3::Zero()}, ctx, o);
  EXPECT_LT((a.kinetics[0].v - Vec3::UnitX()).norm(), 1e-8);
  EXPECT_LT(a.kinetics[0].omega.norm(), 1e-8);
  const MobilitySolution b = solve_mobility(bodies, {Vec3::Zero()}, {8 * kPi * Vec3::UnitZ()}, ctx, o);
  EXPECT_LT((b.kinetics[0].omega - Vec3::UnitZ()).norm(), 1e-8);
  EXPECT_LT(b.kinetics[0].v.norm(), 1e-8);
}

TEST(Solve, ScatteredDensityCarriesNoMoments) {
  MobilityContext ctx;
  const auto shape = surface::make_ellipsoid(1, 0.6, 0.6, 8);
  const std::vector<ParticleSurface> bodies{
      ParticleSurface(shape, Vec3::Zero()),
      ParticleSurface(shape, Vec3(2.8, 0.3, 0), Quat(Eigen::AngleAxisd(0.6, Vec3::UnitZ())))};
  SolverOptions o;
  o.tol = 1e-8;
  const MobilitySolution s = solve_mobility(bodies, {Vec3(0, 0, -1), Vec3(1, 0, 0)}, {Vec3(0, 1, 0), Vec3::Zero()}, ctx, o);
  for (int b = 0; b < 2; ++b) {
    const Moments m = apply_G(PointSet(body_field(s.mu, bodies, b)), bodies[b]);
    EXPECT_LT(m.force.norm(), 10 * o.tol);
    EXPECT_LT(m.torque.norm(), 10 * o.tol);
  }
}

TEST(Solve, TwoSpheresSedimentTogether) {
  MobilityContext ctx;
  const auto shape = surface::make_sphere(1.0, 8);
  const std::vector<ParticleSurface> bodies{ParticleSurface(shape, Vec3(-1.5, 0, 0)),
                                            ParticleSurface(shape, Vec3(1.5, 0, 0))};
  SolverOptions o;
  o.tol = 1e-11;
  const Vec3 F(0, 0, -6 * kPi);
  const MobilitySolution s = solve_mobility(bodies, {F, F}, {Vec3::Zero(), Vec3::Zero()}, ctx, o);
  EXPECT_LT(s.kinetics[0].v.z(), -1.0);
  EXPECT_LT((s.kinetics[0].v - s.kinetics[1].v).norm(), 1e-8);
  EXPECT_NEAR(s.kinetics[0].omega.y(), -s.kinetics[1].omega.y(), 1e-8);
  const MobilitySolution d = dense_solve(bodies, {F, F}, {Vec3::Zero(), Vec3::Zero()});
  for (int b = 0; b < 2; ++b) {
    EXPECT_LT((s.kinetics[b].v - d.kinetics[b].v).norm(), 1e-8);
    EXPECT_LT((s.kinetics[b].omega - d.kinetics[b].omega).norm(), 1e-8);
  }
}

TEST(Solve, NoLoadsNoMotion) {
  MobilityContext ctx;
  const auto shape = surface::make_sphere(1.0, 6);
  const std::vector<ParticleSurface> bodies{ParticleSurface(shape, Vec3::Zero()), ParticleSurface(shape, Vec3(3, 0, 0))};
  const MobilitySolution s = solve_mobility(bodies, {Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3::Zero()}, ctx);
  for (const auto& k : s.kinetics) EXPECT_LT(k.v.norm() + k.omega.norm(), 1e-6);
  EXPECT_LT(s.u.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Velocity, TranslatingSphereAndDecay) {
  MobilityContext ctx;
  const std::vector<ParticleSurface> bodies{unit_sphere(8)};
  SolverOptions o;
  o.tol = 1e-12;
  const MobilitySolution s = solve_mobility(bodies, {6 * kPi * Vec3::UnitZ()}, {Vec3::Zero()}, ctx, o);
  const VecX total = s.rho + s.mu;
  PointSet t(3, 3);
  t << 0, 0, 3, 0, 0, 1.05, 100, 0, 0;
  const PointSet u = evaluate_velocity(bodies, total, t);
  EXPECT_LT((u.row(0).transpose() - oracle::translating_sphere(Vec3::UnitZ(), Vec3(0, 0, 3))).norm(), 1e-8);
  EXPECT_LT((u.row(1).transpose() - oracle::translating_sphere(Vec3::UnitZ(), Vec3(0, 0, 1.05))).norm(), 1e-8);
  EXPECT_LE(u.row(2).norm(), 1.5 * (6 * kPi / (8 * kPi)) / 100);
  PointSet inside(1, 3);
  inside << 0.2, 0.1, 0;
  EXPECT_THROW(evaluate_velocity(bodies, total, inside), DomainError);
}

TEST(Dense, MatchesMatrixFreeAndGrandMobilityIsSpd) {
  MobilityContext ctx;
  const auto shape = surface::make_sphere(1.0, 4);
  const std::vector<ParticleSurface> bodies{ParticleSurface(shape, Vec3::Zero()), ParticleSurface(shape, Vec3(4, 0.5, 0))};
  SolverOptions o;
  o.tol = 1e-13;
  o.max_iter = 200;
  const std::vector<Vec3> F{Vec3(0, 0, -1), Vec3(1, 0, 0.5)}, T{Vec3(0, 0.2, 0), Vec3(-0.1, 0, 0)};
  const MobilitySolution a = solve_mobility(bodies, F, T, ctx, o);
  const MobilitySolution d = dense_solve(bodies, F, T);
  for (int b = 0; b < 2; ++b) {
    EXPECT_LT((a.kinetics[b].v - d.kinetics[b].v).norm(), 1e-8);
    EXPECT_LT((a.kinetics[b].omega - d.kinetics[b].omega).norm(), 1e-8);
  }
  const MatX M = grand_mobility_matrix(bodies, ctx, o);
  ASSERT_EQ(M.rows(), 12);
  EXPECT_LT((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-7);
  const Eigen::SelfAdjointEigenSolver<MatX> eig(0.5 * (M + M.transpose()));
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  const std::vector<ParticleSurface> three{bodies[0], bodies[1], ParticleSurface(shape, Vec3(0, 4, 0))};
  EXPECT_THROW(assemble_dense(three), InvalidArgument);
  EXPECT_GT(dense_condition_number(assemble_dense(bodies)), 1.0);
}

TEST(Dense, ReciprocityErrorDecaysWithResolution) {
  // Closer pairs need more modes before the discrete mobility becomes symmetric.
  double prev = 1.0;
  for (int p : {4, 8}) {
    MobilityContext ctx;
    const auto shape = surface::make_sphere(1.0, p);
    const std::vector<ParticleSurface> bodies{ParticleSurface(shape, Vec3::Zero()),
                                              ParticleSurface(shape, Vec3(3, 0.5, 0))};
    SolverOptions o;
    o.tol = 1e-13;
    o.max_iter = 200;
    const MatX M = grand_mobility_matrix(bodies, ctx, o);
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    EXPECT_LT(asym, prev * 1e-2);
    prev = asym;
  }
  EXPECT_LT(prev, 1e-7);
}
