#ifndef RBS_MOBILITY_GMRES_HPP
#define RBS_MOBILITY_GMRES_HPP

#include <functional>
#include <vector>

#include "rbs/types.hpp"

namespace rbs::mobility {

using LinearMap = std::function<VecX(const VecX&)>;

struct GmresOptions {
  double tol = 1e-6;
  int max_iter = 200;
};

struct GmresResult {
  VecX x;
  int iterations = 0;
  /// Final relative residual |b - A x| / |b|.
  double residual = 0.0;
  std::vector<double> history;
};

/// Right-preconditioned GMRES with full modified Gram-Schmidt and no restarts:
/// solves A M y = b, x = M y. `precond` may be empty. Throws NonConvergence
/// (with the best iterate) when max_iter is reached.
GmresResult gmres(const LinearMap& A, const VecX& b, const GmresOptions& opts = {}, const LinearMap& precond = {},
                  const VecX* x0 = nullptr);

}  // namespace rbs::mobility

#endif
