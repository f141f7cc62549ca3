#include "rbs/layers/self_block.hpp"

#include <cmath>

#include "kernel_block.hpp"
#include "rbs/errors.hpp"
#include "rbs/surface/harmonics.hpp"
#include "rbs/surface/legendre.hpp"

namespace rbs::layers {

using surface::ParticleSurface;
using surface::ShapeModel;

VecX SelfBlock::apply(const VecX& density) const {
  if (density.size() != matrix.cols()) throw ConsistencyError("density size does not match the self block");
  return matrix * density;
}

VecX SelfBlock::apply_rotated(const VecX& density, const Mat3& R) const {
  if (density.size() != matrix.cols()) throw ConsistencyError("density size does not match the self block");
  if (components == 1) return matrix * density;
  const Eigen::Index m = density.size() / 3;
  using RowMap = Eigen::Map<const PointSet>;
  PointSet body = RowMap(density.data(), m, 3) * R;
  VecX out = matrix * Eigen::Map<const VecX>(body.data(), body.size());
  PointSet world = Eigen::Map<const PointSet>(out.data(), m, 3) * R.transpose();
  return Eigen::Map<const VecX>(world.data(), world.size());
}

void check_rotation(const Mat3& R) {
  if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-8 || R.determinant() < 0.0)
    throw InvalidRotation("matrix is not a proper rotation");
}

namespace {

Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }
Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }

// Shape geometry expressed in the frame given by R; translation is irrelevant.
std::vector<SelfBlock> assemble(const ShapeModel& shape, const Mat3& R, const Quat& orientation,
                                const std::vector<KernelTag>& tags) {
  if (tags.empty()) return {};
  const int c = density_components(tags.front());
  for (KernelTag t : tags) {
    if (t == KernelTag::LaplaceGradient) throw InvalidArgument("no self block for the Laplace gradient");
    if (density_components(t) != c) throw InvalidArgument("self blocks built together must share a density type");
  }
  const surface::SphericalGrid& grid = shape.grid();
  const int p = grid.degree();
  const int m = grid.size();
  const int nc = surface::coeff_count(p);
  const MatX& C = shape.real_coefficients();
  const int nt = static_cast<int>(tags.size());

  // Rotated-frame weights: Gauss-Legendre in the polar angle from the target
  // with the 1/|s - N| factor integrated exactly against Legendre series.
  std::vector<double> ring_weight(grid.n_theta());
  for (int j = 0; j < grid.n_theta(); ++j) {
    const double t = grid.gl_node(j);
    const std::vector<double> P = surface::legendre_polynomials(p, t);
    double sum = 0.0;
    for (double v : P) sum += v;
    ring_weight[j] = grid.gl_weight(j) * (2.0 * kPi / grid.n_phi()) * sum * std::sqrt(2.0 - 2.0 * t);
  }
  const double alpha = kPi / grid.n_phi();
  std::vector<Vec3> standard(m);
  for (int l = 0; l < m; ++l) standard[l] = grid.unit_point(l);

  // Per kernel and density component: (m * c) x nc rows of the operator in coefficient space.
  std::vector<std::vector<MatX>> coef_rows(nt, std::vector<MatX>(c, MatX::Zero(m * c, nc)));
  bool degenerate = false;

#pragma omp parallel
  {
    MatX phi_rot(m, nc);
    MatX kw(nt * c * c, m);
    std::vector<double> val(nc), dt(nc), dps(nc);
#pragma omp for schedule(dynamic)
    for (int i = 0; i < m; ++i) {
      const int ji = i / grid.n_phi(), ki = i % grid.n_phi();
      const Mat3 Q = rot_z(alpha) * rot_y(-grid.theta(ji)) * rot_z(-grid.phi(ki));
      const Vec3 x = R * shape.positions().row(i).transpose();
      const Vec3 nx = R * shape.normals().row(i).transpose();
      for (int l = 0; l < m; ++l) {
        const Vec3 yh = Q.transpose() * standard[l];
        const double th = std::acos(std::clamp(yh.z(), -1.0, 1.0));
        const double ph = std::atan2(yh.y(), yh.x());
        surface::real_basis(p, th, ph, val.data(), dt.data(), dps.data());
        Vec3 X = Vec3::Zero(), Xt = Vec3::Zero(), Xps = Vec3::Zero();
        for (int q = 0; q < nc; ++q) {
          phi_rot(l, q) = val[q];
          X += val[q] * C.row(q).transpose();
          Xt += dt[q] * C.row(q).transpose();
          Xps += dps[q] * C.row(q).transpose();
        }
        const double J = Xt.cross(Xps).norm();
        const Vec3 y = R * X;
        if (!((x - y).squaredNorm() > 0.0)) {
          degenerate = true;
          continue;
        }
        const double w = ring_weight[l / grid.n_phi()] * J;
        for (int a = 0; a < nt; ++a) {
          const Mat3 k = w * detail::kernel_block(tags[a], x, nx, y);
          for (int r = 0; r < c; ++r)
            for (int b = 0; b < c; ++b) kw((a * c + b) * c + r, l) = k(r, b);
        }
      }
      const MatX rows = kw * phi_rot;
      for (int a = 0; a < nt; ++a)
        for (int b = 0; b < c; ++b) coef_rows[a][b].middleRows(i * c, c) = rows.middleRows((a * c + b) * c, c);
    }
  }
  if (degenerate) throw GeometryError("rotated quadrature node coincides with its target on shape " + shape.name());

  const MatX& A = shape.analysis();
  std::vector<SelfBlock> blocks(nt);
  for (int a = 0; a < nt; ++a) {
    SelfBlock& blk = blocks[a];
    blk.tag = tags[a];
    blk.components = c;
    blk.reference_orientation = orientation;
    blk.matrix.resize(m * c, m * c);
    for (int b = 0; b < c; ++b) {
      const MatX part = coef_rows[a][b] * A;
      for (int l = 0; l < m; ++l) blk.matrix.col(l * c + b) = part.col(l);
    }
  }
  return blocks;
}

}  // namespace

std::vector<SelfBlock> singular_self_matrices(const ParticleSurface& s, const std::vector<KernelTag>& tags) {
  return assemble(*s.shape(), s.rotation(), s.orientation(), tags);
}

SelfBlock singular_self_matrix(const ParticleSurface& s, KernelTag tag) { return singular_self_matrices(s, {tag}).front(); }

std::vector<SelfBlock> reference_self_matrices(const ShapeModel& shape, const std::vector<KernelTag>& tags) {
  return assemble(shape, Mat3::Identity(), Quat::Identity(), tags);
}

SelfBlock rotate_self_matrix(const SelfBlock& block, const Mat3& R) {
  check_rotation(R);
  SelfBlock out = block;
  out.reference_orientation = (Quat(R) * block.reference_orientation).normalized();
  if (block.components == 1) return out;
  const Eigen::Index m = block.matrix.rows() / 3;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index l = 0; l < m; ++l)
      out.matrix.block<3, 3>(3 * i, 3 * l) = R * block.matrix.block<3, 3>(3 * i, 3 * l) * R.transpose();
  return out;
}

std::shared_ptr<const SelfBlock> SelfBlockCache::get(const surface::ShapePtr& shape, KernelTag tag) {
  if (tag == KernelTag::LaplaceGradient) throw InvalidArgument("no self block for the Laplace gradient");
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = blocks_.find({shape.get(), tag});
  if (it != blocks_.end()) return it->second;
  std::vector<KernelTag> tags;
  if (density_components(tag) == 3)
    tags = {KernelTag::StokesSingle, KernelTag::StokesTraction};
  else
    tags = {KernelTag::LaplaceSingle, KernelTag::LaplaceAdjointDouble};
  std::vector<SelfBlock> built = reference_self_matrices(*shape, tags);
  for (size_t a = 0; a < tags.size(); ++a)
    blocks_[{shape.get(), tags[a]}] = std::make_shared<const SelfBlock>(std::move(built[a]));
  keep_alive_.push_back(shape);
  return blocks_.at({shape.get(), tag});
}

size_t SelfBlockCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return blocks_.size();
}

}  // namespace rbs::layers
