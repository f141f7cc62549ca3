#include "rbs/surface/harmonics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rbs/errors.hpp"

namespace rbs::surface {

namespace {

void check_samples(Eigen::Index rows, const SphericalGrid& grid) {
  if (rows != grid.size())
    throw InvalidArgument("sample count " + std::to_string(rows) + " does not match grid size " +
                          std::to_string(grid.size()));
}

}  // namespace

Complex spherical_harmonic(int n, int m, double theta, double phi) {
  const int am = std::abs(m);
  if (am > n || n < 0) return {0.0, 0.0};
  const LegendreValues P = normalized_legendre(n, theta);
  return P(n, am) * std::polar(1.0, m * phi);
}

HarmonicCoeffs::HarmonicCoeffs(int p, int components) : p_(p), data_(Eigen::MatrixXcd::Zero(coeff_count(p), components)) {
  if (p < 0) throw InvalidArgument("negative harmonic degree");
}

void HarmonicCoeffs::enforce_real_symmetry() {
  for (int c = 0; c < components(); ++c) {
    for (int n = 0; n <= p_; ++n) {
      (*this)(c, n, 0) = Complex((*this)(c, n, 0).real(), 0.0);
      for (int m = 1; m <= n; ++m) (*this)(c, n, -m) = std::conj((*this)(c, n, m));
    }
  }
}

HarmonicCoeffs HarmonicCoeffs::padded(int p_target) const {
  if (p_target < p_) throw InvalidArgument("cannot pad to a lower degree");
  HarmonicCoeffs out(p_target, components());
  out.data_.topRows(coeff_count(p_)) = data_;
  return out;
}

MatX HarmonicCoeffs::to_real() const {
  MatX r = MatX::Zero(coeff_count(p_), components());
  const double rt2 = std::sqrt(2.0);
  for (int c = 0; c < components(); ++c) {
    for (int n = 0; n <= p_; ++n) {
      r(coeff_index(n, 0), c) = (*this)(c, n, 0).real();
      for (int m = 1; m <= n; ++m) {
        r(coeff_index(n, m), c) = rt2 * (*this)(c, n, m).real();
        r(coeff_index(n, -m), c) = -rt2 * (*this)(c, n, m).imag();
      }
    }
  }
  return r;
}

HarmonicCoeffs HarmonicCoeffs::from_real(const MatX& real, int p) {
  if (real.rows() != coeff_count(p)) throw InvalidArgument("real coefficient block has wrong size");
  HarmonicCoeffs out(p, static_cast<int>(real.cols()));
  const double irt2 = 1.0 / std::sqrt(2.0);
  for (int c = 0; c < out.components(); ++c) {
    for (int n = 0; n <= p; ++n) {
      out(c, n, 0) = real(coeff_index(n, 0), c);
      for (int m = 1; m <= n; ++m) {
        out(c, n, m) = Complex(real(coeff_index(n, m), c), -real(coeff_index(n, -m), c)) * irt2;
        out(c, n, -m) = std::conj(out(c, n, m));
      }
    }
  }
  return out;
}

HarmonicCoeffs forward_sht(const Eigen::MatrixXcd& samples, const SphericalGrid& grid) {
  check_samples(samples.rows(), grid);
  const int p = grid.degree();
  const int nphi = grid.n_phi();
  const int ncomp = static_cast<int>(samples.cols());
  HarmonicCoeffs out(p, ncomp);
  std::vector<Complex> twiddle(nphi);
  for (int j = 0; j < grid.n_theta(); ++j) {
    const double wt = grid.sphere_weight(j);
    const LegendreValues& P = grid.legendre(j);
    for (int m = -p; m <= p; ++m) {
      for (int k = 0; k < nphi; ++k) twiddle[k] = std::polar(1.0, -m * grid.phi(k));
      for (int c = 0; c < ncomp; ++c) {
        Complex ring(0.0, 0.0);
        for (int k = 0; k < nphi; ++k) ring += samples(grid.index(j, k), c) * twiddle[k];
        ring *= wt;
        for (int n = std::abs(m); n <= p; ++n) out(c, n, m) += P(n, std::abs(m)) * ring;
      }
    }
  }
  return out;
}

HarmonicCoeffs forward_sht(const MatX& samples, const SphericalGrid& grid) {
  check_samples(samples.rows(), grid);
  HarmonicCoeffs out = forward_sht(Eigen::MatrixXcd(samples.cast<Complex>()), grid);
  out.enforce_real_symmetry();
  return out;
}

Eigen::MatrixXcd inverse_sht_complex(const HarmonicCoeffs& coeffs, const SphericalGrid& grid) {
  const int p = coeffs.degree();
  if (p > grid.degree())
    throw InvalidArgument("coefficient degree " + std::to_string(p) + " exceeds grid degree " +
                          std::to_string(grid.degree()));
  const int ncomp = coeffs.components();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(grid.size(), ncomp);
  const LegendreValues* P = nullptr;
  LegendreValues local;
  for (int j = 0; j < grid.n_theta(); ++j) {
    if (p == grid.degree()) {
      P = &grid.legendre(j);
    } else {
      normalized_legendre(p, grid.theta(j), local);
      P = &local;
    }
    for (int c = 0; c < ncomp; ++c) {
      for (int m = -p; m <= p; ++m) {
        Complex ring(0.0, 0.0);
        for (int n = std::abs(m); n <= p; ++n) ring += coeffs(c, n, m) * (*P)(n, std::abs(m));
        if (ring == Complex(0.0, 0.0)) continue;
        for (int k = 0; k < grid.n_phi(); ++k) out(grid.index(j, k), c) += ring * std::polar(1.0, m * grid.phi(k));
      }
    }
  }
  return out;
}

MatX inverse_sht(const HarmonicCoeffs& coeffs, const SphericalGrid& grid) {
  return inverse_sht_complex(coeffs, grid).real();
}

Eigen::VectorXcd evaluate(const HarmonicCoeffs& coeffs, double theta, double phi) {
  const int p = coeffs.degree();
  const LegendreValues P = normalized_legendre(p, theta);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(coeffs.components());
  for (int c = 0; c < coeffs.components(); ++c)
    for (int n = 0; n <= p; ++n)
      for (int m = -n; m <= n; ++m) out(c) += coeffs(c, n, m) * P(n, std::abs(m)) * std::polar(1.0, m * phi);
  return out;
}

MatX upsample(const HarmonicCoeffs& coeffs, int p_target) {
  if (p_target < coeffs.degree()) throw InvalidArgument("upsampling target degree is below the source degree");
  return inverse_sht(coeffs.padded(p_target), SphericalGrid(p_target));
}

MatX upsample(const MatX& samples, const SphericalGrid& grid, int p_target) {
  if (p_target < grid.degree()) throw InvalidArgument("upsampling target degree is below the source degree");
  check_samples(samples.rows(), grid);
  return resampling_matrix(grid, SphericalGrid(p_target)) * samples;
}

void real_basis(int p, double theta, double phi, double* value, double* dtheta, double* dphi_over_sin) {
  thread_local LegendreValues P;
  normalized_legendre(p, theta, P);
  const double rt2 = std::sqrt(2.0);
  // cos(m phi), sin(m phi) by angle addition.
  const double c1 = std::cos(phi), s1 = std::sin(phi);
  double cm = 1.0, sm = 0.0;
  for (int m = 0; m <= p; ++m) {
    for (int n = m; n <= p; ++n) {
      const int t = tri_index(n, m);
      if (m == 0) {
        const int i = coeff_index(n, 0);
        if (value) value[i] = P.value[t];
        if (dtheta) dtheta[i] = P.dtheta[t];
        if (dphi_over_sin) dphi_over_sin[i] = 0.0;
      } else {
        const int ip = coeff_index(n, m), im = coeff_index(n, -m);
        if (value) {
          value[ip] = rt2 * P.value[t] * cm;
          value[im] = rt2 * P.value[t] * sm;
        }
        if (dtheta) {
          dtheta[ip] = rt2 * P.dtheta[t] * cm;
          dtheta[im] = rt2 * P.dtheta[t] * sm;
        }
        if (dphi_over_sin) {
          dphi_over_sin[ip] = -rt2 * m * P.over_sin[t] * sm;
          dphi_over_sin[im] = rt2 * m * P.over_sin[t] * cm;
        }
      }
    }
    const double cn = cm * c1 - sm * s1;
    sm = sm * c1 + cm * s1;
    cm = cn;
  }
}

MatX analysis_matrix(const SphericalGrid& grid) {
  const int p = grid.degree();
  MatX A(coeff_count(p), grid.size());
  std::vector<double> row(coeff_count(p));
  for (int j = 0; j < grid.n_theta(); ++j) {
    for (int k = 0; k < grid.n_phi(); ++k) {
      real_basis(p, grid.theta(j), grid.phi(k), row.data(), nullptr, nullptr);
      const int node = grid.index(j, k);
      for (int q = 0; q < coeff_count(p); ++q) A(q, node) = grid.sphere_weight(j) * row[q];
    }
  }
  return A;
}

Synthesis synthesis_matrices(int p, const SphericalGrid& target) {
  Synthesis s;
  const int nc = coeff_count(p);
  s.value.resize(target.size(), nc);
  s.dtheta.resize(target.size(), nc);
  s.dphi_over_sin.resize(target.size(), nc);
  std::vector<double> v(nc), dt(nc), dp(nc);
  for (int j = 0; j < target.n_theta(); ++j) {
    for (int k = 0; k < target.n_phi(); ++k) {
      real_basis(p, target.theta(j), target.phi(k), v.data(), dt.data(), dp.data());
      const int node = target.index(j, k);
      for (int q = 0; q < nc; ++q) {
        s.value(node, q) = v[q];
        s.dtheta(node, q) = dt[q];
        s.dphi_over_sin(node, q) = dp[q];
      }
    }
  }
  return s;
}

MatX synthesis_matrix(int p, const SphericalGrid& target) {
  const int nc = coeff_count(p);
  MatX S(target.size(), nc);
  std::vector<double> v(nc);
  for (int j = 0; j < target.n_theta(); ++j) {
    for (int k = 0; k < target.n_phi(); ++k) {
      real_basis(p, target.theta(j), target.phi(k), v.data(), nullptr, nullptr);
      const int node = target.index(j, k);
      for (int q = 0; q < nc; ++q) S(node, q) = v[q];
    }
  }
  return S;
}

MatX resampling_matrix(const SphericalGrid& from, const SphericalGrid& to) {
  if (to.degree() < from.degree()) throw InvalidArgument("resampling target grid is coarser than the source grid");
  return synthesis_matrix(from.degree(), to) * analysis_matrix(from);
}

}  // namespace rbs::surface
