#ifndef RBS_DYNAMICS_ROTATION_HPP
#define RBS_DYNAMICS_ROTATION_HPP

#include "rbs/types.hpp"

namespace rbs::dynamics {

/// Unit quaternion of the rotation vector theta (axis theta/|theta|, angle |theta|).
Quat exp_map(const Vec3& theta);
/// Rodrigues formula for the same rotation.
Mat3 rodrigues(const Vec3& theta);

/// q' = exp(omega dt) q, renormalized; world-frame angular velocity.
Quat rotation_step(const Quat& q, const Vec3& omega, double dt);

/// Inverse of the right-trivialized differential of exp on so(3), truncated
/// after the third-order term (enough for fourth-order schemes).
Vec3 dexpinv(const Vec3& theta, const Vec3& w);

/// max |R^T R - I| entry.
double orthogonality_error(const Mat3& R);

}  // namespace rbs::dynamics

#endif
