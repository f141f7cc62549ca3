#include "rbs/surface/legendre.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rbs::surface {

void normalized_legendre(int p, double theta, LegendreValues& out) {
  const int size = tri_size(p);
  out.degree = p;
  out.value.assign(size, 0.0);
  out.dtheta.assign(size, 0.0);
  out.over_sin.assign(size, 0.0);

  const double x = std::cos(theta);
  const double s = std::sin(theta);
  auto& v = out.value;
  auto& q = out.over_sin;

  v[0] = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 1; m <= p; ++m) {
    const double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    v[tri_index(m, m)] = f * s * v[tri_index(m - 1, m - 1)];
    // Same sectoral recurrence with one fewer power of sin(theta).
    q[tri_index(m, m)] = (m == 1) ? f * v[0] : f * s * q[tri_index(m - 1, m - 1)];
  }
  for (int m = 0; m <= p; ++m) {
    if (m + 1 <= p) {
      const double f = std::sqrt(2.0 * m + 3.0);
      v[tri_index(m + 1, m)] = f * x * v[tri_index(m, m)];
      if (m > 0) q[tri_index(m + 1, m)] = f * x * q[tri_index(m, m)];
    }
    for (int n = m + 2; n <= p; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) / (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      v[tri_index(n, m)] = a * (x * v[tri_index(n - 1, m)] - b * v[tri_index(n - 2, m)]);
      if (m > 0) q[tri_index(n, m)] = a * (x * q[tri_index(n - 1, m)] - b * q[tri_index(n - 2, m)]);
    }
  }

  // Ladder relation for the theta derivative; no division by sin(theta).
  for (int n = 0; n <= p; ++n) {
    const double nn = n;
    out.dtheta[tri_index(n, 0)] = (n >= 1) ? -std::sqrt(nn * (nn + 1.0)) * v[tri_index(n, 1)] : 0.0;
    for (int m = 1; m <= n; ++m) {
      const double mm = m;
      const double lower = std::sqrt((nn + mm) * (nn - mm + 1.0)) * v[tri_index(n, m - 1)];
      const double upper = (m < n) ? std::sqrt((nn + mm + 1.0) * (nn - mm)) * v[tri_index(n, m + 1)] : 0.0;
      out.dtheta[tri_index(n, m)] = 0.5 * (lower - upper);
    }
  }
}

LegendreValues normalized_legendre(int p, double theta) {
  LegendreValues out;
  normalized_legendre(p, theta, out);
  return out;
}

std::vector<double> legendre_polynomials(int p, double t) {
  std::vector<double> P(p + 1, 0.0);
  P[0] = 1.0;
  if (p >= 1) P[1] = t;
  for (int n = 2; n <= p; ++n) P[n] = ((2.0 * n - 1.0) * t * P[n - 1] - (n - 1.0) * P[n - 2]) / n;
  return P;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      // p1 = P_n(t), p0 = P_{n-1}(t)
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    nodes[i] = t;
    nodes[n - 1 - i] = -t;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

}  // namespace rbs::surface
