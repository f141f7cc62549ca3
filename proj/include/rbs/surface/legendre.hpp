#ifndef RBS_SURFACE_LEGENDRE_HPP
#define RBS_SURFACE_LEGENDRE_HPP

#include <vector>

namespace rbs::surface {

/// Packed (n, m) index for 0 <= m <= n.
constexpr int tri_index(int n, int m) { return n * (n + 1) / 2 + m; }
constexpr int tri_size(int p) { return (p + 1) * (p + 2) / 2; }

/// Orthonormal associated Legendre functions
///   Pbar_n^m(cos t) = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m(cos t)
/// without the Condon-Shortley phase, together with d/dtheta and the
/// pole-regular quotient Pbar_n^m / sin(theta) (zero for m = 0).
struct LegendreValues {
  int degree = -1;
  std::vector<double> value;
  std::vector<double> dtheta;
  std::vector<double> over_sin;

  double operator()(int n, int m) const { return value[tri_index(n, m)]; }
};

void normalized_legendre(int p, double theta, LegendreValues& out);
LegendreValues normalized_legendre(int p, double theta);

/// Ordinary Legendre polynomials P_0(t) .. P_p(t).
std::vector<double> legendre_polynomials(int p, double t);

/// n-point Gauss-Legendre rule on [-1, 1] with nodes in descending order.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace rbs::surface

#endif
