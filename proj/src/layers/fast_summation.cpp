#include "rbs/layers/fast_summation.hpp"

#include <cmath>

#include "rbs/errors.hpp"

namespace rbs::layers {

namespace {

template <class Request>
void check_request(const Request& r, Eigen::Index strength_rows) {
  if (!r.sources || !r.strengths || !r.targets) throw InvalidArgument("summation request is missing arrays");
  if (strength_rows != r.sources->rows()) throw InvalidArgument("one strength per source is required");
  if (!r.source_group.empty() && r.source_group.size() != static_cast<size_t>(r.sources->rows()))
    throw InvalidArgument("source group ids do not match the source count");
  if (!r.target_group.empty() && r.target_group.size() != static_cast<size_t>(r.targets->rows()))
    throw InvalidArgument("target group ids do not match the target count");
  if (r.source_group.empty() != r.target_group.empty())
    throw InvalidArgument("group ids must be given for both sources and targets");
}

}  // namespace

StokesResult DirectSummation::stokes(const StokesRequest& req) const {
  check_request(req, req.strengths->rows());
  const PointSet& src = *req.sources;
  const PointSet& f = *req.strengths;
  const PointSet& trg = *req.targets;
  const Eigen::Index ns = src.rows(), nt = trg.rows();
  const bool grouped = !req.source_group.empty();
  const double c8 = 1.0 / (8.0 * kPi), c4 = 1.0 / (4.0 * kPi);

  StokesResult out;
  out.velocity = PointSet::Zero(nt, 3);
  if (req.with_gradient) {
    out.pressure = VecX::Zero(nt);
    out.gradient.setZero(nt, 9);
  }
  bool coincident = false;
#pragma omp parallel for schedule(static) reduction(||: coincident)
  for (Eigen::Index t = 0; t < nt; ++t) {
    const double x0 = trg(t, 0), x1 = trg(t, 1), x2 = trg(t, 2);
    const int gt = grouped ? req.target_group[t] : -1;
    double u[3] = {0, 0, 0}, p = 0.0, g[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    for (Eigen::Index s = 0; s < ns; ++s) {
      if (grouped && req.source_group[s] == gt) continue;
      const double r[3] = {x0 - src(s, 0), x1 - src(s, 1), x2 - src(s, 2)};
      const double d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
      if (d2 == 0.0) {
        coincident = true;
        continue;
      }
      const double inv = 1.0 / std::sqrt(d2);
      const double inv3 = inv * inv * inv;
      const double fs[3] = {f(s, 0), f(s, 1), f(s, 2)};
      const double rf = r[0] * fs[0] + r[1] * fs[1] + r[2] * fs[2];
      for (int i = 0; i < 3; ++i) u[i] += fs[i] * inv + rf * r[i] * inv3;
      if (req.with_gradient) {
        p += rf * inv3;
        const double inv5 = inv3 * inv * inv;
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k)
            g[3 * i + k] += (-fs[i] * r[k] + (i == k ? rf : 0.0) + r[i] * fs[k]) * inv3 - 3.0 * r[i] * r[k] * rf * inv5;
      }
    }
    for (int i = 0; i < 3; ++i) out.velocity(t, i) = c8 * u[i];
    if (req.with_gradient) {
      out.pressure(t) = c4 * p;
      for (int q = 0; q < 9; ++q) out.gradient(t, q) = c8 * g[q];
    }
  }
  if (coincident) throw SingularEvaluation("source and target coincide in direct summation");
  return out;
}

LaplaceResult DirectSummation::laplace(const LaplaceRequest& req) const {
  check_request(req, req.strengths->size());
  const PointSet& src = *req.sources;
  const VecX& q = *req.strengths;
  const PointSet& trg = *req.targets;
  const Eigen::Index ns = src.rows(), nt = trg.rows();
  const bool grouped = !req.source_group.empty();
  const double c4 = 1.0 / (4.0 * kPi);

  LaplaceResult out;
  out.potential = VecX::Zero(nt);
  if (req.with_gradient) out.gradient = PointSet::Zero(nt, 3);
  bool coincident = false;
#pragma omp parallel for schedule(static) reduction(||: coincident)
  for (Eigen::Index t = 0; t < nt; ++t) {
    const int gt = grouped ? req.target_group[t] : -1;
    double phi = 0.0, g[3] = {0, 0, 0};
    for (Eigen::Index s = 0; s < ns; ++s) {
      if (grouped && req.source_group[s] == gt) continue;
      const double r[3] = {trg(t, 0) - src(s, 0), trg(t, 1) - src(s, 1), trg(t, 2) - src(s, 2)};
      const double d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
      if (d2 == 0.0) {
        coincident = true;
        continue;
      }
      const double inv = 1.0 / std::sqrt(d2);
      phi += q(s) * inv;
      if (req.with_gradient) {
        const double inv3 = inv * inv * inv;
        for (int i = 0; i < 3; ++i) g[i] -= q(s) * r[i] * inv3;
      }
    }
    out.potential(t) = c4 * phi;
    if (req.with_gradient)
      for (int i = 0; i < 3; ++i) out.gradient(t, i) = c4 * g[i];
  }
  if (coincident) throw SingularEvaluation("source and target coincide in direct summation");
  return out;
}

}  // namespace rbs::layers
