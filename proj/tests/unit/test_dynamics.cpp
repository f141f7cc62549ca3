#include <gtest/gtest.h>

#include <random>

#include "rbs/dynamics/contact.hpp"
#include "rbs/dynamics/integrator.hpp"
#include "rbs/dynamics/rotation.hpp"
#include "rbs/errors.hpp"
#include "rbs/mobility/dense_reference.hpp"
#include "rbs/mobility/solver.hpp"
#include "rbs/surface/shape.hpp"

using namespace rbs;
using namespace rbs::dynamics;
using rbs::kPi;
using surface::ParticleSurface;
using surface::Pose;

namespace {

std::vector<ParticleSurface> spheres(const std::vector<Vec3>& centers, int p = 8) {
  const auto shape = surface::make_sphere(1.0, p);
  std::vector<ParticleSurface> out;
  for (const auto& c : centers) out.emplace_back(shape, c);
  return out;
}

// Velocities of free bodies under fixed loads, from the matrix-free solver.
StageFunction loaded(const surface::ShapePtr& shape, std::vector<Vec3> F, std::vector<Vec3> T,
                     mobility::MobilityContext& ctx) {
  return [shape, F, T, &ctx](double, const std::vector<Pose>& poses) {
    std::vector<ParticleSurface> bodies;
    for (const auto& q : poses) bodies.emplace_back(shape, q);
    mobility::SolverOptions o;
    o.tol = 1e-12;
    const auto s = mobility::solve_mobility(bodies, F, T, ctx, o);
    StageVelocities out;
    for (const auto& k : s.kinetics) {
      out.v.push_back(k.v);
      out.omega.push_back(k.omega);
    }
    out.iterations = s.report.iterations;
    return out;
  };
}

mobility::MobilityContext& shared_context() {
  static mobility::MobilityContext ctx;
  return ctx;
}

MobilityMap dense_map(const std::vector<ParticleSurface>& bodies) {
  return [&bodies](const VecX& loads) {
    std::vector<Vec3> F, T;
    for (size_t i = 0; i < bodies.size(); ++i) {
      F.push_back(loads.segment<3>(6 * i));
      T.push_back(loads.segment<3>(6 * i + 3));
    }
    const auto s = mobility::dense_solve(bodies, F, T);
    VecX V(6 * bodies.size());
    for (size_t i = 0; i < bodies.size(); ++i) V.segment<6>(6 * i) << s.kinetics[i].v, s.kinetics[i].omega;
    return V;
  };
}

MobilityMap iterative_map(const std::vector<ParticleSurface>& bodies) {
  return [&bodies](const VecX& loads) {
    std::vector<Vec3> F, T;
    for (size_t i = 0; i < bodies.size(); ++i) {
      F.push_back(loads.segment<3>(6 * i));
      T.push_back(loads.segment<3>(6 * i + 3));
    }
    mobility::SolverOptions o;
    o.tol = 1e-12;
    o.max_iter = 200;
    const auto s = mobility::solve_mobility(bodies, F, T, shared_context(), o);
    VecX V(6 * bodies.size());
    for (size_t i = 0; i < bodies.size(); ++i) V.segment<6>(6 * i) << s.kinetics[i].v, s.kinetics[i].omega;
    return V;
  };
}

}  // namespace

TEST(Rotation, QuarterTurnAndIdentity) {
  const Quat q = rotation_step(Quat::Identity(), Vec3(0, 0, kPi / 2), 1.0);
  EXPECT_LT((q.toRotationMatrix() * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-12);
  const Quat q0(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
  const Quat q1 = rotation_step(q0, Vec3::Zero(), 0.3);
  EXPECT_LT((q1.coeffs() - q0.coeffs()).norm(), 1e-15);
}

TEST(Rotation, GroupPropertyAndRodrigues) {
  const Vec3 w(0.3, -1.1, 0.8);
  const Quat q0(Eigen::AngleAxisd(1.3, Vec3(-1, 0.5, 2).normalized()));
  const Quat two = rotation_step(rotation_step(q0, w, 0.4), w, 0.4);
  const Quat one = rotation_step(q0, w, 0.8);
  EXPECT_LT((two.toRotationMatrix() - one.toRotationMatrix()).cwiseAbs().maxCoeff(), 1e-12);
  const Vec3 theta(0.2, 0.9, -0.4);
  const Mat3 ref = Eigen::AngleAxisd(theta.norm(), theta.normalized()).toRotationMatrix();
  EXPECT_LT((rodrigues(theta) - ref).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((exp_map(theta).toRotationMatrix() - ref).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((rodrigues(Vec3::Zero()) - Mat3::Identity()).norm(), 1e-15);
}

TEST(Rotation, DexpinvTruncatedSeries) {
  // dexp^{-1}(theta) w = w - theta x w / 2 + theta x (theta x w) / 12 + O(theta^4)
  const Vec3 w(0.4, -0.2, 1.0);
  const Vec3 t(0.01, 0.02, -0.015);
  const Vec3 expect = w - 0.5 * t.cross(w) + t.cross(t.cross(w)) / 12.0;
  EXPECT_LT((dexpinv(t, w) - expect).norm(), 1e-12);
  EXPECT_LT((dexpinv(Vec3::Zero(), w) - w).norm(), 1e-15);
}

TEST(Rotation, OrthogonalityError) {
  EXPECT_LT(orthogonality_error(rodrigues(Vec3(1, 2, 3))), 1e-15);
  Mat3 A = Mat3::Identity();
  A(0, 1) = 1e-3;
  EXPECT_GT(orthogonality_error(A), 1e-4);
}

TEST(Integrator, TableausAreConsistent) {
  for (Scheme s : {Scheme::Euler, Scheme::Heun, Scheme::RK4}) {
    const Tableau& tb = tableau(s);
    double sum = 0;
    for (double b : tb.b) sum += b;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    for (int i = 0; i < tb.stages(); ++i) {
      double row = 0;
      for (double a : tb.a[i]) row += a;
      EXPECT_NEAR(row, tb.c[i], 1e-15);
    }
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_EQ(tableau(Scheme::RK4).stages(), 4);
  EXPECT_EQ(tableau(Scheme::Heun).stages(), 2);
  EXPECT_THROW(parse_scheme("leapfrog"), InvalidArgument);
}

TEST(Integrator, ConstantForceTranslatesExactly) {
  const auto shape = surface::make_sphere(1.0, 8);
  for (Scheme s : {Scheme::Euler, Scheme::Heun, Scheme::RK4}) {
    SystemState st;
    st.poses = {Pose{Vec3(0.3, -0.2, 0.1), Quat::Identity()}};
    st.scheme = s;
    st.dt = 0.25;
    const auto f = loaded(shape, {6 * kPi * Vec3::UnitX()}, {Vec3::Zero()}, shared_context());
    for (int k = 0; k < 4; ++k) step(st, f);
    EXPECT_NEAR(st.t, 1.0, 1e-15);
    EXPECT_LT((st.poses[0].centroid - Vec3(1.3, -0.2, 0.1)).norm(), 1e-8) << to_string(s);
    EXPECT_LT(Quat(st.poses[0].orientation).angularDistance(Quat::Identity()), 1e-8);
  }
}

TEST(Integrator, ConstantTorqueQuarterTurn) {
  const auto shape = surface::make_sphere(1.0, 8);
  SystemState st;
  st.poses = {Pose{}};
  st.scheme = Scheme::RK4;
  st.dt = kPi / 2;
  const StepResult r = step(st, loaded(shape, {Vec3::Zero()}, {8 * kPi * Vec3::UnitZ()}, shared_context()));
  const Mat3 R = st.poses[0].rotation();
  EXPECT_LT((R * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-6);
  EXPECT_LT((R * Vec3::UnitZ() - Vec3::UnitZ()).norm(), 1e-6);
  EXPECT_LT((r.initial.omega[0] - Vec3::UnitZ()).norm(), 1e-8);
  EXPECT_GT(r.iterations, 0);
}

TEST(Integrator, ZeroVelocityLeavesStateUnchanged) {
  SystemState st;
  const Quat q(Eigen::AngleAxisd(0.4, Vec3::UnitY()));
  st.poses = {Pose{Vec3(1, 2, 3), q}, Pose{Vec3(-1, 0, 0), Quat::Identity()}};
  st.dt = 0.1;
  const StageFunction zero = [](double, const std::vector<Pose>& p) {
    StageVelocities v;
    v.v.assign(p.size(), Vec3::Zero());
    v.omega.assign(p.size(), Vec3::Zero());
    return v;
  };
  step(st, zero);
  EXPECT_EQ(st.poses[0].centroid, Vec3(1, 2, 3));
  EXPECT_LT((st.poses[0].orientation.coeffs() - q.coeffs()).norm(), 1e-15);
}

TEST(Integrator, OrderOnAnalyticFlow) {
  // v = (cos t, sin t, 0), omega = (0, 0, 1): exact centroid (sin t, 1 - cos t, 0).
  const StageFunction f = [](double t, const std::vector<Pose>&) {
    StageVelocities v;
    v.v = {Vec3(std::cos(t), std::sin(t), 0)};
    v.omega = {Vec3(0.2 * t, 0, 1)};
    return v;
  };
  auto error = [&](Scheme s, int n) {
    SystemState st;
    st.poses = {Pose{}};
    st.scheme = s;
    st.dt = 1.0 / n;
    for (int k = 0; k < n; ++k) step(st, f);
    return (st.poses[0].centroid - Vec3(std::sin(1.0), 1 - std::cos(1.0), 0)).norm();
  };
  EXPECT_NEAR(std::log2(error(Scheme::Euler, 32) / error(Scheme::Euler, 64)), 1.0, 0.1);
  EXPECT_NEAR(std::log2(error(Scheme::Heun, 32) / error(Scheme::Heun, 64)), 2.0, 0.1);
  EXPECT_NEAR(std::log2(error(Scheme::RK4, 16) / error(Scheme::RK4, 32)), 4.0, 0.2);
}

TEST(Integrator, RotationOrderWithTimeDependentSpin) {
  // Non-commuting angular velocity; reference from a very fine rk4 run.
  const StageFunction f = [](double t, const std::vector<Pose>&) {
    StageVelocities v;
    v.v = {Vec3::Zero()};
    v.omega = {Vec3(std::cos(2 * t), std::sin(3 * t), 0.5 + t)};
    return v;
  };
  auto run = [&](Scheme s, int n) {
    SystemState st;
    st.poses = {Pose{}};
    st.scheme = s;
    st.dt = 1.0 / n;
    for (int k = 0; k < n; ++k) step(st, f);
    return st.poses[0].rotation();
  };
  const Mat3 ref = run(Scheme::RK4, 2048);
  const double e1 = (run(Scheme::RK4, 16) - ref).norm(), e2 = (run(Scheme::RK4, 32) - ref).norm();
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
  const double h1 = (run(Scheme::Heun, 32) - ref).norm(), h2 = (run(Scheme::Heun, 64) - ref).norm();
  EXPECT_NEAR(std::log2(h1 / h2), 2.0, 0.3);
}

TEST(Integrator, OrthogonalityAfterManySteps) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> U(-1, 1);
  const Vec3 a(U(gen), U(gen), U(gen)), b(U(gen), U(gen), U(gen));
  const StageFunction f = [&](double t, const std::vector<Pose>&) {
    StageVelocities v;
    v.v = {Vec3(std::sin(t), 0, 0)};
    v.omega = {3.0 * (a * std::cos(1.7 * t) + b * std::sin(0.9 * t))};
    return v;
  };
  SystemState st;
  st.poses = {Pose{}};
  st.dt = 0.05;
  for (int k = 0; k < 1000; ++k) step(st, f);
  EXPECT_LT(orthogonality_error(st.poses[0].rotation()), 1e-10);
  EXPECT_NEAR(st.poses[0].orientation.norm(), 1.0, 1e-12);
}

TEST(Contact, DetectionCases) {
  EXPECT_TRUE(detect_contacts(spheres({Vec3::Zero(), Vec3(3, 0, 0)}), 0.1).empty());
  const auto pair = detect_contacts(spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}), 0.1);
  ASSERT_EQ(pair.size(), 1u);
  EXPECT_EQ(pair[0].i, 0);
  EXPECT_EQ(pair[0].j, 1);
  EXPECT_LT((pair[0].point - Vec3(1.025, 0, 0)).norm(), 0.1);
  EXPECT_GT(pair[0].normal.x(), 0.95);
  EXPECT_NEAR(pair[0].normal.norm(), 1.0, 1e-14);
  EXPECT_LT(pair[0].gap, 0.1);
  const auto line = detect_contacts(spheres({Vec3::Zero(), Vec3(2.02, 0, 0), Vec3(4.04, 0, 0)}), 0.1);
  ASSERT_EQ(line.size(), 2u);
  for (const auto& c : line) EXPECT_EQ(c.j - c.i, 1);
  EXPECT_THROW(detect_contacts(spheres({Vec3::Zero(), Vec3(1.5, 0, 0)}), 0.1), GeometryError);
  EXPECT_NEAR(default_contact_delta(spheres({Vec3::Zero()})), 0.1, 1e-12);
}

TEST(Contact, VelocityMapMatchesRigidMotion) {
  const auto b = spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}, 4);
  const auto c = detect_contacts(b, 0.1);
  ASSERT_EQ(c.size(), 1u);
  const MatX D = contact_velocity_map(c, b);
  ASSERT_EQ(D.rows(), 3);
  ASSERT_EQ(D.cols(), 12);
  VecX V(12);
  V << 1, 2, 3, 0.1, 0.2, 0.3, -1, 0.5, 0, 0, 0, 0.4;
  const Vec3 r0 = c[0].point - b[0].centroid(), r1 = c[0].point - b[1].centroid();
  const Vec3 u0 = V.segment<3>(0) + V.segment<3>(3).cross(r0);
  const Vec3 u1 = V.segment<3>(6) + V.segment<3>(9).cross(r1);
  EXPECT_LT((D * V - (u0 - u1)).norm(), 1e-14);
}

TEST(Contact, HeadOnSqueezeStopsApproach) {
  const auto b = spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}, 8);
  const auto c = detect_contacts(b, 0.1);
  ASSERT_EQ(c.size(), 1u);
  const MobilityMap M = iterative_map(b);
  VecX loads = VecX::Zero(12);
  loads.segment<3>(0) = Vec3(1, 0, 0);
  loads.segment<3>(6) = Vec3(-1, 0, 0);
  const VecX V0 = M(loads);
  const auto corr = contact_forces(c, b, V0, M);
  const VecX du = contact_velocity_map(c, b) * corr.velocities;
  EXPECT_LT(std::abs(du.dot(c[0].normal)), 1e-8);
  EXPECT_LT(du.norm(), 1e-8);
  EXPECT_LT((corr.velocities.segment<3>(0) + corr.velocities.segment<3>(6)).norm(), 1e-8);
  EXPECT_EQ(corr.MC.cols(), 3);
}

TEST(Contact, CompatibleVelocitiesNeedNoForce) {
  const auto b = spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}, 8);
  const auto c = detect_contacts(b, 0.1);
  VecX V0 = VecX::Zero(12);
  V0.segment<3>(0) = Vec3(0, 0, -0.3);
  V0.segment<3>(6) = Vec3(0, 0, -0.3);
  const auto corr = contact_forces(c, b, V0, iterative_map(b));
  EXPECT_LT(corr.forces.norm(), 1e-10);
  EXPECT_LT((corr.velocities - V0).norm(), 1e-10);
}

TEST(Contact, SymmetricSqueezeForceOnCenterLine) {
  const auto b = spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}, 4);
  const auto c = detect_contacts(b, 0.1);
  ASSERT_EQ(c.size(), 1u);
  VecX loads = VecX::Zero(12);
  loads.segment<3>(0) = Vec3(1, 0, 0);
  loads.segment<3>(6) = Vec3(-1, 0, 0);
  const MobilityMap dense = dense_map(b), iter = iterative_map(b);
  const auto cd = contact_forces(c, b, dense(loads), dense);
  const auto ci = contact_forces(c, b, iter(loads), iter);
  const Vec3 Fd = cd.forces.head<3>(), Fi = ci.forces.head<3>();
  const Vec3 e = (b[1].centroid() - b[0].centroid()).normalized();
  EXPECT_LT((Fd - Fd.dot(e) * e).norm(), 1e-8 * Fd.norm());
  EXPECT_LT((Fi - Fi.dot(e) * e).norm(), 1e-8 * Fi.norm());
  EXPECT_LT(Fd.dot(e), 0.0);
  EXPECT_LT((Fd - Fi).norm(), 1e-6 * Fd.norm());
}

TEST(Contact, DegenerateSystemRaises) {
  const auto b = spheres({Vec3::Zero(), Vec3(2.05, 0, 0)}, 4);
  auto c = detect_contacts(b, 0.1);
  c.push_back(c[0]);
  const MobilityMap M = iterative_map(b);
  EXPECT_THROW(contact_forces(c, b, VecX::Zero(12), M), ContactError);
}
