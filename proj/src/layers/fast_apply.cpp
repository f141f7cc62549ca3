#include "rbs/layers/fast_apply.hpp"

#include "rbs/errors.hpp"
#include "rbs/kernels/kernels.hpp"

namespace rbs::layers {

using surface::ParticleSurface;

InteractionOperator::InteractionOperator(const std::vector<ParticleSurface>& bodies, KernelTag tag, SelfBlockCache& cache,
                                         std::shared_ptr<const FastSummation> provider, const NearOptions& opts)
    : tag_(tag), c_(density_components(tag)), provider_(std::move(provider)) {
  if (tag == KernelTag::LaplaceGradient) throw InvalidArgument("on-surface operator needs a scalar or Stokes kernel");
  if (!provider_) provider_ = std::make_shared<DirectSummation>();
  const int n = static_cast<int>(bodies.size());
  for (const auto& b : bodies) {
    offsets_.push_back(static_cast<int>(total_nodes_));
    node_counts_.push_back(b.node_count());
    total_nodes_ += b.node_count();
    rotations_.push_back(b.rotation());
    blocks_.push_back(cache.get(b.shape(), tag));
  }
  points_.resize(total_nodes_, 3);
  normals_.resize(total_nodes_, 3);
  weights_.resize(total_nodes_);
  groups_.resize(total_nodes_);
  for (int i = 0; i < n; ++i) {
    points_.middleRows(offsets_[i], node_counts_[i]) = bodies[i].positions();
    normals_.middleRows(offsets_[i], node_counts_[i]) = bodies[i].normals();
    weights_.segment(offsets_[i], node_counts_[i]) = bodies[i].weights();
    for (int l = 0; l < node_counts_[i]; ++l) groups_[offsets_[i] + l] = i;
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const ParticleSurface& src = bodies[j];
      const double reach = src.bounding_radius() + bodies[i].bounding_radius() + near_threshold(src, opts);
      if ((bodies[i].centroid() - src.centroid()).norm() > reach) continue;
      NearCorrection corr{i, j, {}, {}};
      for (int l = 0; l < node_counts_[i]; ++l)
        if (in_near_zone(src, bodies[i].positions().row(l).transpose(), opts)) corr.target_nodes.push_back(l);
      if (corr.target_nodes.empty()) continue;
      PointSet tx(corr.target_nodes.size(), 3), tn(corr.target_nodes.size(), 3);
      for (size_t q = 0; q < corr.target_nodes.size(); ++q) {
        const Vec3 x = bodies[i].positions().row(corr.target_nodes[q]).transpose();
        if (is_inside_or_on(src, x, std::max(opts.upsample, 4) * src.degree()))
          throw GeometryError("bodies " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        tx.row(q) = x.transpose();
        tn.row(q) = bodies[i].normals().row(corr.target_nodes[q]);
      }
      corr.matrix = layer_matrix(tag, src, tx, &tn, opts.upsample) - layer_matrix(tag, src, tx, &tn, 1);
      near_.push_back(std::move(corr));
    }
  }
}

VecX InteractionOperator::apply_self_body(int body, const VecX& density_body) const {
  return blocks_[body]->apply_rotated(density_body, rotations_[body]);
}

VecX InteractionOperator::apply_self(const VecX& density) const {
  if (density.size() != size()) throw ConsistencyError("density size does not match the configuration");
  VecX out(size());
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const int b = static_cast<int>(i);
    out.segment(offset(b), body_size(b)) = apply_self_body(b, density.segment(offset(b), body_size(b)));
  }
  return out;
}

VecX InteractionOperator::apply_inter(const VecX& density) const {
  if (density.size() != size()) throw ConsistencyError("density size does not match the configuration");
  VecX out = VecX::Zero(size());
  if (blocks_.size() < 2) return out;
  if (c_ == 3) {
    PointSet strengths = Eigen::Map<const PointSet>(density.data(), total_nodes_, 3);
    strengths.array().colwise() *= weights_.array();
    StokesRequest req;
    req.sources = &points_;
    req.strengths = &strengths;
    req.targets = &points_;
    req.source_group = groups_;
    req.target_group = groups_;
    req.with_gradient = tag_ == KernelTag::StokesTraction;
    const StokesResult res = provider_->stokes(req);
    Eigen::Map<PointSet> o(out.data(), total_nodes_, 3);
    if (tag_ == KernelTag::StokesSingle) {
      o = res.velocity;
    } else {
      for (Eigen::Index t = 0; t < total_nodes_; ++t) {
        kernels::StokesletDerivatives d;
        d.pressure = res.pressure(t);
        for (int a = 0; a < 3; ++a)
          for (int k = 0; k < 3; ++k) d.grad(a, k) = res.gradient(t, 3 * a + k);
        o.row(t) = kernels::traction_from_gradient(d, normals_.row(t).transpose()).transpose();
      }
    }
  } else {
    const VecX strengths = density.cwiseProduct(weights_);
    LaplaceRequest req;
    req.sources = &points_;
    req.strengths = &strengths;
    req.targets = &points_;
    req.source_group = groups_;
    req.target_group = groups_;
    req.with_gradient = tag_ == KernelTag::LaplaceAdjointDouble;
    const LaplaceResult res = provider_->laplace(req);
    if (tag_ == KernelTag::LaplaceSingle)
      out = res.potential;
    else
      out = (res.gradient.cwiseProduct(normals_)).rowwise().sum();
  }
  for (const NearCorrection& corr : near_) {
    const VecX add = corr.matrix * density.segment(offset(corr.source_body), body_size(corr.source_body));
    for (size_t q = 0; q < corr.target_nodes.size(); ++q)
      out.segment(offset(corr.target_body) + corr.target_nodes[q] * c_, c_) += add.segment(q * c_, c_);
  }
  return out;
}

VecX InteractionOperator::apply(const VecX& density) const { return apply_self(density) + apply_inter(density); }

VecX fast_apply(KernelTag tag, const std::vector<ParticleSurface>& bodies, const VecX& density, SelfBlockCache& cache,
                std::shared_ptr<const FastSummation> provider, const NearOptions& opts) {
  return InteractionOperator(bodies, tag, cache, std::move(provider), opts).apply(density);
}

}  // namespace rbs::layers
