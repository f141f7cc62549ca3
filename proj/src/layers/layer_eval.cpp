#include "rbs/layers/layer_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_block.hpp"
#include "rbs/errors.hpp"
#include "rbs/surface/harmonics.hpp"
#include "rbs/surface/legendre.hpp"

namespace rbs::layers {

using surface::ParticleSurface;

std::string to_string(KernelTag tag) {
  switch (tag) {
    case KernelTag::StokesSingle: return "stokes-single";
    case KernelTag::StokesTraction: return "stokes-traction";
    case KernelTag::LaplaceSingle: return "laplace-single";
    case KernelTag::LaplaceAdjointDouble: return "laplace-adjoint-double";
    case KernelTag::LaplaceGradient: return "laplace-gradient";
  }
  return "unknown";
}

int density_components(KernelTag tag) {
  return tag == KernelTag::StokesSingle || tag == KernelTag::StokesTraction ? 3 : 1;
}

int value_components(KernelTag tag) {
  switch (tag) {
    case KernelTag::StokesSingle:
    case KernelTag::StokesTraction:
    case KernelTag::LaplaceGradient: return 3;
    default: return 1;
  }
}

bool needs_target_normals(KernelTag tag) {
  return tag == KernelTag::StokesTraction || tag == KernelTag::LaplaceAdjointDouble;
}

namespace {

struct Geometry {
  Vec3 X, Xt, Xps;
};

Geometry shape_geometry(const MatX& C, int p, double th, double ph, std::vector<double>& val,
                        std::vector<double>& dt, std::vector<double>& dps) {
  surface::real_basis(p, th, ph, val.data(), dt.data(), dps.data());
  Geometry g{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (Eigen::Index q = 0; q < C.rows(); ++q) {
    g.X += val[q] * C.row(q).transpose();
    g.Xt += dt[q] * C.row(q).transpose();
    g.Xps += dps[q] * C.row(q).transpose();
  }
  return g;
}

// Parameter point (unit vector) of the surface point closest to x, in the
// shape frame, by Gauss-Newton from the closest node.
Vec3 closest_parameter(const surface::ShapeModel& shape, const Vec3& x) {
  const int p = shape.degree();
  const MatX& C = shape.real_coefficients();
  std::vector<double> val(C.rows()), dt(C.rows()), dps(C.rows());
  Eigen::Index best = 0;
  (shape.positions().rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff(&best);
  Vec3 u = shape.grid().unit_point(static_cast<int>(best));
  for (int it = 0; it < 60; ++it) {
    const double th = std::acos(std::clamp(u.z(), -1.0, 1.0)), ph = std::atan2(u.y(), u.x());
    const Geometry g = shape_geometry(C, p, th, ph, val, dt, dps);
    Eigen::Matrix<double, 3, 2> J;
    J << g.Xt, g.Xps;
    Eigen::Vector2d step = -(J.transpose() * J).ldlt().solve(J.transpose() * (g.X - x));
    if (step.norm() > 0.25) step *= 0.25 / step.norm();
    const Vec3 et(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
    const Vec3 ep(-std::sin(ph), std::cos(ph), 0.0);
    u = (u + step(0) * et + step(1) * ep).normalized();
    if (step.norm() < 1e-15) break;
  }
  return u;
}

}  // namespace

double near_threshold(const ParticleSurface& s, const NearOptions& opts) { return opts.near_factor * s.max_spacing(); }

double min_node_distance(const ParticleSurface& s, const Vec3& x) {
  return (s.positions().rowwise() - x.transpose()).rowwise().norm().minCoeff();
}

double signed_distance(const ParticleSurface& s, const Vec3& x) {
  const surface::ShapeModel& shape = *s.shape();
  const Vec3 x_ref = s.rotation().transpose() * (x - s.centroid());
  const Vec3 u = closest_parameter(shape, x_ref);
  std::vector<double> val(shape.real_coefficients().rows()), dt(val.size()), dps(val.size());
  const double th = std::acos(std::clamp(u.z(), -1.0, 1.0)), ph = std::atan2(u.y(), u.x());
  const Geometry g = shape_geometry(shape.real_coefficients(), shape.degree(), th, ph, val, dt, dps);
  Vec3 n = g.Xt.cross(g.Xps).normalized();
  Eigen::Index best = 0;
  (shape.positions().rowwise() - g.X.transpose()).rowwise().squaredNorm().minCoeff(&best);
  if (n.dot(shape.normals().row(best).transpose()) < 0.0) n = -n;
  const Vec3 r = x_ref - g.X;
  const double d = r.norm();
  if (d <= 1e-14 * std::max(1.0, shape.bounding_radius())) return 0.0;
  return r.dot(n) >= 0.0 ? d : -d;
}

bool in_near_zone(const ParticleSurface& s, const Vec3& x, const NearOptions& opts) {
  if ((x - s.centroid()).norm() > s.bounding_radius() + near_threshold(s, opts)) return false;
  return min_node_distance(s, x) < near_threshold(s, opts);
}

ParticleSurface upsampled_surface(const ParticleSurface& s, int p_target) {
  if (p_target == s.degree()) return s;
  return ParticleSurface(s.shape()->upsampled(p_target), s.pose());
}

double winding_number(const ParticleSurface& s, const Vec3& x, int p_eval) {
  const ParticleSurface fine = upsampled_surface(s, p_eval > 0 ? p_eval : 4 * s.degree());
  double sum = 0.0;
  for (int i = 0; i < fine.node_count(); ++i) {
    const Vec3 r = fine.positions().row(i).transpose() - x;
    const double d = r.norm();
    if (d == 0.0) return 0.5;
    sum += fine.weights()(i) * r.dot(fine.normals().row(i).transpose()) / (d * d * d);
  }
  return sum / (4.0 * kPi);
}

bool is_inside_or_on(const ParticleSurface& s, const Vec3& x, int p_eval) {
  if ((x - s.centroid()).norm() > s.bounding_radius()) return false;
  if (min_node_distance(s, x) < 2.0 * s.max_spacing()) return signed_distance(s, x) <= 0.0;
  return winding_number(s, x, p_eval) > 0.25;
}

namespace {

void check_inputs(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
                  const PointSet* normals) {
  if (density.rows() != s.node_count() || density.cols() != density_components(tag))
    throw InvalidArgument("density shape does not match the surface and kernel " + to_string(tag));
  if (needs_target_normals(tag) && (!normals || normals->rows() != targets.rows()))
    throw InvalidArgument("kernel " + to_string(tag) + " needs one normal per target");
}

MatX smooth_sum(KernelTag tag, const PointSet& y, const VecX& w, const MatX& density, const PointSet& targets,
                const PointSet* normals) {
  const int co = value_components(tag), ci = density_components(tag);
  MatX out = MatX::Zero(targets.rows(), co);
  bool coincident = false;
#pragma omp parallel for schedule(static) reduction(|| : coincident)
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    const Vec3 x = targets.row(t).transpose();
    const Vec3 nx = normals ? Vec3(normals->row(t).transpose()) : Vec3::Zero();
    Vec3 acc = Vec3::Zero();
    for (Eigen::Index l = 0; l < y.rows(); ++l) {
      const Vec3 yl = y.row(l).transpose();
      if ((x - yl).squaredNorm() == 0.0) {
        coincident = true;
        continue;
      }
      const Mat3 k = detail::kernel_block(tag, x, nx, yl);
      acc.head(co) += w(l) * k.topLeftCorner(co, ci) * density.row(l).transpose();
    }
    out.row(t) = acc.head(co).transpose();
  }
  if (coincident) throw SingularEvaluation("layer target coincides with a quadrature node");
  return out;
}

void check_outside(const ParticleSurface& s, const PointSet& targets, int kappa) {
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    if (is_inside_or_on(s, targets.row(t).transpose(), std::max(kappa, 4) * s.degree()))
      throw DomainError("near evaluation target " + std::to_string(t) + " is on or inside the surface");
  }
}

// Rows in coefficient space (one value_components x coeff_count block per
// density component) of a quadrature adapted to a target close to s: the
// parameter sphere is rotated so the closest surface point is the pole, the
// polar angle is split into panels refined geometrically towards the pole,
// and density and geometry are evaluated from their expansions.
std::vector<MatX> adapted_rows(KernelTag tag, const ParticleSurface& s, const Vec3& x, const Vec3& nx, int kappa) {
  const surface::ShapeModel& shape = *s.shape();
  const int p = shape.degree();
  const MatX& C = shape.real_coefficients();
  const int nc = static_cast<int>(C.rows());
  const int co = value_components(tag), ci = density_components(tag);
  const Mat3& R = s.rotation();
  const Vec3 x_ref = R.transpose() * (x - s.centroid());

  const Vec3 u0 = closest_parameter(shape, x_ref);
  const double th0 = std::acos(std::clamp(u0.z(), -1.0, 1.0)), ph0 = std::atan2(u0.y(), u0.x());
  std::vector<double> val(nc), dt(nc), dps(nc);
  const Geometry g0 = shape_geometry(C, p, th0, ph0, val, dt, dps);
  const double dist = (g0.X - x_ref).norm();
  const double speed = std::sqrt(g0.Xt.cross(g0.Xps).norm());
  const Mat3 Q = (Eigen::AngleAxisd(-th0, Vec3::UnitY()) * Eigen::AngleAxisd(-ph0, Vec3::UnitZ())).toRotationMatrix();

  std::vector<double> breaks{0.0};
  for (double b = std::max(dist / speed, 1e-8); b < kPi; b *= 2.0) breaks.push_back(b);
  breaks.push_back(kPi);
  const int order = kappa * p / 2 + 4;
  const int n_phi = 2 * kappa * p + 2;
  std::vector<double> gl_t, gl_w;
  surface::gauss_legendre(order, gl_t, gl_w);

  std::vector<MatX> rows(ci, MatX::Zero(co, nc));
  for (size_t pan = 0; pan + 1 < breaks.size(); ++pan) {
    const double a = breaks[pan], b = breaks[pan + 1];
    for (int g = 0; g < order; ++g) {
      const double tp = 0.5 * (a + b) + 0.5 * (b - a) * gl_t[g];
      const double ring = 0.5 * (b - a) * gl_w[g] * std::sin(tp) * (2.0 * kPi / n_phi);
      for (int k = 0; k < n_phi; ++k) {
        const double pp = 2.0 * kPi * k / n_phi;
        const Vec3 yh = Q.transpose() * Vec3(std::sin(tp) * std::cos(pp), std::sin(tp) * std::sin(pp), std::cos(tp));
        const double th = std::acos(std::clamp(yh.z(), -1.0, 1.0)), ph = std::atan2(yh.y(), yh.x());
        const Geometry geo = shape_geometry(C, p, th, ph, val, dt, dps);
        const Vec3 y = s.centroid() + R * geo.X;
        if ((x - y).squaredNorm() == 0.0) throw SingularEvaluation("layer target coincides with a quadrature node");
        const Mat3 kern = (ring * geo.Xt.cross(geo.Xps).norm()) * detail::kernel_block(tag, x, nx, y);
        for (int bb = 0; bb < ci; ++bb)
          for (int aa = 0; aa < co; ++aa) {
            const double kv = kern(aa, bb);
            double* row = &rows[bb](aa, 0);
            for (int q = 0; q < nc; ++q) row[q * co] += kv * val[q];
          }
      }
    }
  }
  return rows;
}

}  // namespace

namespace {

MatX adapted_eval(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
                  const PointSet* target_normals, int kappa) {
  if (kappa == 1) return smooth_sum(tag, s.positions(), s.weights(), density, targets, target_normals);
  const int co = value_components(tag), ci = density_components(tag);
  const MatX coeffs = s.shape()->analysis() * density;
  MatX out(targets.rows(), co);
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    const Vec3 nx = target_normals ? Vec3(target_normals->row(t).transpose()) : Vec3::Zero();
    const std::vector<MatX> rows = adapted_rows(tag, s, targets.row(t).transpose(), nx, kappa);
    VecX v = VecX::Zero(co);
    for (int b = 0; b < ci; ++b) v += rows[b] * coeffs.col(b);
    out.row(t) = v.transpose();
  }
  return out;
}

MatX routed_eval(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
                 const PointSet* target_normals, const NearOptions& opts, bool interior) {
  check_inputs(tag, s, density, targets, target_normals);
  std::vector<Eigen::Index> near, far;
  for (Eigen::Index t = 0; t < targets.rows(); ++t)
    (in_near_zone(s, targets.row(t).transpose(), opts) ? near : far).push_back(t);

  auto gather = [](const PointSet& src, const std::vector<Eigen::Index>& idx) {
    PointSet out(static_cast<Eigen::Index>(idx.size()), 3);
    for (size_t q = 0; q < idx.size(); ++q) out.row(q) = src.row(idx[q]);
    return out;
  };
  MatX out(targets.rows(), value_components(tag));
  for (int pass = 0; pass < 2; ++pass) {
    const auto& idx = pass == 0 ? far : near;
    if (idx.empty()) continue;
    const PointSet tx = gather(targets, idx);
    PointSet tn;
    if (target_normals) tn = gather(*target_normals, idx);
    const PointSet* np = target_normals ? &tn : nullptr;
    MatX vals;
    if (pass == 0) {
      vals = smooth_sum(tag, s.positions(), s.weights(), density, tx, np);
    } else if (interior) {
      for (Eigen::Index t = 0; t < tx.rows(); ++t)
        if (signed_distance(s, tx.row(t).transpose()) >= 0.0)
          throw DomainError("interior evaluation target " + std::to_string(idx[t]) + " is on or outside the surface");
      vals = adapted_eval(tag, s, density, tx, np, opts.upsample);
    } else {
      vals = near_eval(tag, s, density, tx, np, opts.upsample);
    }
    for (size_t q = 0; q < idx.size(); ++q) out.row(idx[q]) = vals.row(q);
  }
  return out;
}

}  // namespace

MatX smooth_layer_eval(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
                       const PointSet* target_normals, const NearOptions& opts) {
  check_inputs(tag, s, density, targets, target_normals);
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    if (in_near_zone(s, targets.row(t).transpose(), opts))
      throw NearZoneViolation("target " + std::to_string(t) + " lies in the near zone of the surface");
  }
  return smooth_sum(tag, s.positions(), s.weights(), density, targets, target_normals);
}

MatX near_eval(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
               const PointSet* target_normals, int kappa) {
  check_inputs(tag, s, density, targets, target_normals);
  if (kappa < 1) throw InvalidArgument("upsampling factor must be at least 1");
  check_outside(s, targets, kappa);
  return adapted_eval(tag, s, density, targets, target_normals, kappa);
}

MatX evaluate_layer(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
                    const PointSet* target_normals, const NearOptions& opts) {
  return routed_eval(tag, s, density, targets, target_normals, opts, false);
}

MatX evaluate_layer_inside(KernelTag tag, const ParticleSurface& s, const MatX& density, const PointSet& targets,
                           const PointSet* target_normals, const NearOptions& opts) {
  return routed_eval(tag, s, density, targets, target_normals, opts, true);
}

MatX layer_matrix(KernelTag tag, const ParticleSurface& s, const PointSet& targets, const PointSet* target_normals,
                  int kappa) {
  if (kappa < 1) throw InvalidArgument("upsampling factor must be at least 1");
  if (needs_target_normals(tag) && (!target_normals || target_normals->rows() != targets.rows()))
    throw InvalidArgument("kernel " + to_string(tag) + " needs one normal per target");
  const int co = value_components(tag), ci = density_components(tag);
  const Eigen::Index nt = targets.rows(), m = s.node_count();
  MatX out(nt * co, m * ci);
  if (kappa == 1) {
    for (Eigen::Index t = 0; t < nt; ++t) {
      const Vec3 x = targets.row(t).transpose();
      const Vec3 nx = target_normals ? Vec3(target_normals->row(t).transpose()) : Vec3::Zero();
      for (Eigen::Index l = 0; l < m; ++l) {
        const Vec3 yl = s.positions().row(l).transpose();
        if ((x - yl).squaredNorm() == 0.0) throw SingularEvaluation("layer target coincides with a quadrature node");
        const Mat3 k = s.weights()(l) * detail::kernel_block(tag, x, nx, yl);
        out.block(t * co, l * ci, co, ci) = k.topLeftCorner(co, ci);
      }
    }
    return out;
  }
  check_outside(s, targets, kappa);
  const MatX& A = s.shape()->analysis();
  for (Eigen::Index t = 0; t < nt; ++t) {
    const Vec3 nx = target_normals ? Vec3(target_normals->row(t).transpose()) : Vec3::Zero();
    const std::vector<MatX> rows = adapted_rows(tag, s, targets.row(t).transpose(), nx, kappa);
    for (int b = 0; b < ci; ++b) {
      const MatX part = rows[b] * A;
      for (Eigen::Index l = 0; l < m; ++l) out.block(t * co, l * ci + b, co, 1) = part.col(l);
    }
  }
  return out;
}

}  // namespace rbs::layers
