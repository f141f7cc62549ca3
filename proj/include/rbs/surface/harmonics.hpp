#ifndef RBS_SURFACE_HARMONICS_HPP
#define RBS_SURFACE_HARMONICS_HPP

#include <complex>

#include "rbs/surface/grid.hpp"
#include "rbs/types.hpp"

namespace rbs::surface {

constexpr int coeff_index(int n, int m) { return n * n + n + m; }
constexpr int coeff_count(int p) { return (p + 1) * (p + 1); }

using Complex = std::complex<double>;

/// Y_n^m(theta, phi) = Pbar_n^{|m|}(cos theta) e^{i m phi}.
Complex spherical_harmonic(int n, int m, double theta, double phi);

/// Complex coefficients x_n^m, one column per component.
class HarmonicCoeffs {
 public:
  HarmonicCoeffs() = default;
  HarmonicCoeffs(int p, int components);

  int degree() const { return p_; }
  int components() const { return static_cast<int>(data_.cols()); }

  Complex& operator()(int comp, int n, int m) { return data_(coeff_index(n, m), comp); }
  const Complex& operator()(int comp, int n, int m) const { return data_(coeff_index(n, m), comp); }

  const Eigen::MatrixXcd& data() const { return data_; }
  Eigen::MatrixXcd& data() { return data_; }

  /// Overwrite the m < 0 half with conj of the m > 0 half and drop the
  /// imaginary part of m = 0 (real-valued fields).
  void enforce_real_symmetry();
  HarmonicCoeffs padded(int p_target) const;

  /// Coefficients in the real orthonormal basis used by the nodal operators.
  MatX to_real() const;
  static HarmonicCoeffs from_real(const MatX& real, int p);

 private:
  int p_ = 0;
  Eigen::MatrixXcd data_;
};

/// Samples are (grid.size() x components), node index order of the grid.
HarmonicCoeffs forward_sht(const Eigen::MatrixXcd& samples, const SphericalGrid& grid);
/// Real samples; the result carries exact conjugate symmetry.
HarmonicCoeffs forward_sht(const MatX& samples, const SphericalGrid& grid);

Eigen::MatrixXcd inverse_sht_complex(const HarmonicCoeffs& coeffs, const SphericalGrid& grid);
/// Real part of the synthesized expansion; intended for symmetric coefficients.
MatX inverse_sht(const HarmonicCoeffs& coeffs, const SphericalGrid& grid);

Eigen::VectorXcd evaluate(const HarmonicCoeffs& coeffs, double theta, double phi);

/// Zero-pad to degree p_target and synthesize on the degree-p_target grid.
MatX upsample(const HarmonicCoeffs& coeffs, int p_target);
MatX upsample(const MatX& samples, const SphericalGrid& grid, int p_target);

// Real orthonormal basis, index n^2 + n + m:
//   m = 0: Pbar_n^0,  m > 0: sqrt2 Pbar_n^m cos(m phi),  m < 0: sqrt2 Pbar_n^|m| sin(|m| phi).
// Any output pointer may be null; non-null buffers need coeff_count(p) entries.
void real_basis(int p, double theta, double phi, double* value, double* dtheta, double* dphi_over_sin);

/// Rows: real coefficients; columns: grid nodes. Exact on degree-p input.
MatX analysis_matrix(const SphericalGrid& grid);

struct Synthesis {
  MatX value;
  MatX dtheta;
  MatX dphi_over_sin;  ///< (d/dphi) / sin(theta), regular at the poles
};
/// Degree-p basis evaluated at the nodes of `target` (rows) with derivatives.
Synthesis synthesis_matrices(int p, const SphericalGrid& target);
MatX synthesis_matrix(int p, const SphericalGrid& target);

/// Nodal-to-nodal interpolation from `from` to `to` (to.degree() >= from.degree()).
MatX resampling_matrix(const SphericalGrid& from, const SphericalGrid& to);

}  // namespace rbs::surface

#endif
