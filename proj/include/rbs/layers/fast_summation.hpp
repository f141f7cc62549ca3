#ifndef RBS_LAYERS_FAST_SUMMATION_HPP
#define RBS_LAYERS_FAST_SUMMATION_HPP

#include <string>
#include <vector>

#include "rbs/types.hpp"

namespace rbs::layers {

/// Pairs whose source and target carry the same group id are skipped, which
/// is how self-interactions of a body are left to its singular block. Empty
/// group vectors disable the exclusion.
struct StokesRequest {
  const PointSet* sources = nullptr;
  /// Quadrature-weighted force strengths, one row per source.
  const PointSet* strengths = nullptr;
  const PointSet* targets = nullptr;
  std::vector<int> source_group;
  std::vector<int> target_group;
  bool with_gradient = false;
};

struct StokesResult {
  PointSet velocity;
  VecX pressure;
  /// Row t holds d u_i / d x_k at index 3 i + k.
  Eigen::Matrix<double, Eigen::Dynamic, 9, Eigen::RowMajor> gradient;
};

struct LaplaceRequest {
  const PointSet* sources = nullptr;
  const VecX* strengths = nullptr;
  const PointSet* targets = nullptr;
  std::vector<int> source_group;
  std::vector<int> target_group;
  bool with_gradient = false;
};

struct LaplaceResult {
  VecX potential;
  PointSet gradient;
};

class FastSummation {
 public:
  virtual ~FastSummation() = default;
  virtual std::string name() const = 0;
  /// Relative accuracy of the sums; 0 means exact up to rounding.
  virtual double accuracy() const = 0;
  virtual StokesResult stokes(const StokesRequest& request) const = 0;
  virtual LaplaceResult laplace(const LaplaceRequest& request) const = 0;
};

/// O(N M) double loop over sources and targets.
class DirectSummation final : public FastSummation {
 public:
  std::string name() const override { return "direct"; }
  double accuracy() const override { return 0.0; }
  StokesResult stokes(const StokesRequest& request) const override;
  LaplaceResult laplace(const LaplaceRequest& request) const override;
};

}  // namespace rbs::layers

#endif
