#ifndef RBS_SURFACE_SHAPE_HPP
#define RBS_SURFACE_SHAPE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rbs/surface/grid.hpp"
#include "rbs/surface/harmonics.hpp"
#include "rbs/types.hpp"

namespace rbs::surface {

/// Reference geometry of a rigid body on its degree-p grid: coordinates in the
/// body frame with the area centroid at the origin, plus everything derived
/// from them that does not depend on pose. Immutable once built; bodies with
/// the same shape share one instance.
class ShapeModel {
 public:
  /// `coords` are coordinate coefficients of any degree; they are padded or
  /// truncated to `p` and recentered on the area centroid unless `recenter`
  /// is false (used for resampled copies of an already centered shape).
  ShapeModel(std::string name, const HarmonicCoeffs& coords, int p, bool recenter = true);

  const std::string& name() const { return name_; }
  int degree() const { return grid_.degree(); }
  int node_count() const { return grid_.size(); }
  const SphericalGrid& grid() const { return grid_; }
  const HarmonicCoeffs& coefficients() const { return coeffs_; }
  /// Real-basis coordinate coefficients, coeff_count(p) x 3.
  const MatX& real_coefficients() const { return real_coeffs_; }
  /// Offset that was removed from the input coordinates to center them.
  const Vec3& input_centroid() const { return input_centroid_; }

  const PointSet& positions() const { return x_; }
  const PointSet& x_theta() const { return x_theta_; }
  const PointSet& x_phi() const { return x_phi_; }
  const PointSet& normals() const { return n_; }
  /// Area element |x_theta x x_phi| with respect to dtheta dphi.
  const VecX& area_element() const { return W_; }
  /// Quadrature weight per node for integrals in dS.
  const VecX& weights() const { return dS_; }

  double area() const { return area_; }
  const Mat3& inertia() const { return inertia_; }
  /// Largest distance between neighbouring grid nodes.
  double max_spacing() const { return h_; }
  double bounding_radius() const { return bound_; }

  const MatX& analysis() const { return analysis_; }
  const Synthesis& nodal_synthesis() const { return synthesis_; }

  /// Same shape on the degree-p_target grid (cached).
  std::shared_ptr<const ShapeModel> upsampled(int p_target) const;

 private:
  std::string name_;
  SphericalGrid grid_;
  HarmonicCoeffs coeffs_;
  MatX real_coeffs_;
  Vec3 input_centroid_ = Vec3::Zero();
  PointSet x_, x_theta_, x_phi_, n_;
  VecX W_, dS_;
  double area_ = 0.0;
  Mat3 inertia_ = Mat3::Zero();
  double h_ = 0.0;
  double bound_ = 0.0;
  MatX analysis_;
  Synthesis synthesis_;

  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::shared_ptr<const ShapeModel>> upsampled_;
};

using ShapePtr = std::shared_ptr<const ShapeModel>;

HarmonicCoeffs sphere_coefficients(double radius);
HarmonicCoeffs ellipsoid_coefficients(double a, double b, double c);

ShapePtr make_sphere(double radius, int p);
ShapePtr make_ellipsoid(double a, double b, double c, int p);

/// Named shapes: "sphere(a)", "ellipsoid(a,b,c)" or an entry of a library.
struct ShapeEntry {
  std::string name;
  HarmonicCoeffs coords;
};

class ShapeLibrary {
 public:
  ShapeLibrary() = default;
  /// JSON array (or {"shapes": [...]}) of {name, p, coeffs: [[[re, im], ...] x 3]}.
  static ShapeLibrary load(const std::string& path);
  static ShapeLibrary parse(const std::string& json_text);
  std::string to_json() const;

  void add(ShapeEntry entry);
  bool contains(const std::string& name) const;
  /// Resolves built-ins as well as library entries.
  HarmonicCoeffs coefficients(const std::string& spec) const;
  ShapePtr build(const std::string& spec, int p) const;

  const std::vector<ShapeEntry>& entries() const { return entries_; }

 private:
  std::vector<ShapeEntry> entries_;
};

/// Parses "sphere(1.5)" / "ellipsoid(1,0.5,0.5)"; throws InvalidArgument otherwise.
HarmonicCoeffs builtin_shape(const std::string& spec);

}  // namespace rbs::surface

#endif
