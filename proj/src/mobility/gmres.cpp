#include "rbs/mobility/gmres.hpp"

#include <cmath>

#include "rbs/errors.hpp"

namespace rbs::mobility {

GmresResult gmres(const LinearMap& A, const VecX& b, const GmresOptions& opts, const LinearMap& precond,
                  const VecX* x0) {
  const Eigen::Index n = b.size();
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x = VecX::Zero(n);
    res.history.push_back(0.0);
    return res;
  }
  auto M = [&](const VecX& v) { return precond ? precond(v) : v; };

  VecX x = x0 ? *x0 : VecX::Zero(n);
  if (x.size() != n) throw InvalidArgument("initial guess size does not match the right-hand side");
  VecX r = x0 ? VecX(b - A(x)) : b;
  double beta = r.norm();
  res.history.push_back(beta / bnorm);
  if (beta / bnorm <= opts.tol) {
    res.x = x;
    res.residual = beta / bnorm;
    return res;
  }

  const int kmax = std::max(1, std::min<int>(opts.max_iter, static_cast<int>(n)));
  MatX V(n, kmax + 1);
  MatX H = MatX::Zero(kmax + 1, kmax);
  VecX cs = VecX::Zero(kmax), sn = VecX::Zero(kmax), g = VecX::Zero(kmax + 1);
  V.col(0) = r / beta;
  g(0) = beta;

  auto solution = [&](int k) {
    VecX y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    return VecX(x + M(V.leftCols(k) * y));
  };

  int k = 0;
  double rel = beta / bnorm;
  while (k < kmax) {
    VecX w = A(M(V.col(k)));
    for (int j = 0; j <= k; ++j) {
      H(j, k) = V.col(j).dot(w);
      w -= H(j, k) * V.col(j);
    }
    H(k + 1, k) = w.norm();
    for (int j = 0; j < k; ++j) {
      const double t = cs(j) * H(j, k) + sn(j) * H(j + 1, k);
      H(j + 1, k) = -sn(j) * H(j, k) + cs(j) * H(j + 1, k);
      H(j, k) = t;
    }
    const double denom = std::hypot(H(k, k), H(k + 1, k));
    const double hk1 = H(k + 1, k);
    if (denom == 0.0) {
      cs(k) = 1.0;
      sn(k) = 0.0;
    } else {
      cs(k) = H(k, k) / denom;
      sn(k) = hk1 / denom;
    }
    H(k, k) = denom;
    H(k + 1, k) = 0.0;
    g(k + 1) = -sn(k) * g(k);
    g(k) = cs(k) * g(k);
    ++k;
    rel = std::abs(g(k)) / bnorm;
    res.history.push_back(rel);
    if (rel <= opts.tol || hk1 <= 1e-14 * beta) break;
    V.col(k) = w / hk1;
  }
  res.x = solution(k);
  res.iterations = k;
  res.residual = rel;
  if (rel > opts.tol)
    throw NonConvergence("GMRES did not reach tolerance " + std::to_string(opts.tol) + " in " + std::to_string(k) +
                             " iterations (residual " + std::to_string(rel) + ")",
                         res.x, res.history);
  return res;
}

}  // namespace rbs::mobility
