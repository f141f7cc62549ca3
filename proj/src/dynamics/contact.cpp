#include "rbs/dynamics/contact.hpp"

#include <limits>
#include <sstream>

#include "rbs/errors.hpp"
#include "rbs/layers/layer_eval.hpp"

namespace rbs::dynamics {

using surface::ParticleSurface;

double default_contact_delta(const std::vector<ParticleSurface>& bodies) {
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& b : bodies) {
    const double radius = (b.positions().rowwise() - b.centroid().transpose()).rowwise().norm().maxCoeff();
    dmin = std::min(dmin, 2.0 * radius);
  }
  return 0.05 * dmin;
}

std::vector<Contact> detect_contacts(const std::vector<ParticleSurface>& bodies, double delta) {
  std::vector<Contact> out;
  const int n = static_cast<int>(bodies.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const ParticleSurface& a = bodies[i];
      const ParticleSurface& b = bodies[j];
      if ((a.centroid() - b.centroid()).norm() > a.bounding_radius() + b.bounding_radius() + delta) continue;
      double best = std::numeric_limits<double>::infinity();
      int ia = -1, ib = -1;
      for (int p = 0; p < a.node_count(); ++p) {
        Eigen::Index q;
        const double d = (b.positions().rowwise() - a.positions().row(p)).rowwise().squaredNorm().minCoeff(&q);
        if (d < best) {
          best = d;
          ia = p;
          ib = static_cast<int>(q);
        }
      }
      best = std::sqrt(best);
      if (best >= delta) continue;
      // Any node of one body inside the other means the surfaces overlap.
      for (int side = 0; side < 2; ++side) {
        const ParticleSurface& s = side == 0 ? a : b;
        const ParticleSurface& o = side == 0 ? b : a;
        for (int p = 0; p < s.node_count(); ++p) {
          const Vec3 x = s.positions().row(p).transpose();
          if (layers::min_node_distance(o, x) > std::max(delta, o.max_spacing())) continue;
          if (layers::winding_number(o, x) > 0.5)
            throw GeometryError("bodies " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
      }
      Contact c;
      c.i = i;
      c.j = j;
      const Vec3 xa = a.positions().row(ia).transpose(), xb = b.positions().row(ib).transpose();
      c.point = 0.5 * (xa + xb);
      c.gap = best;
      c.normal = best > 0.0 ? Vec3((xb - xa) / best) : Vec3((b.centroid() - a.centroid()).normalized());
      out.push_back(c);
    }
  }
  return out;
}

MatX contact_velocity_map(const std::vector<Contact>& contacts, const std::vector<ParticleSurface>& bodies) {
  const int n = static_cast<int>(bodies.size());
  MatX D = MatX::Zero(3 * contacts.size(), 6 * n);
  for (size_t k = 0; k < contacts.size(); ++k) {
    const Contact& c = contacts[k];
    const Vec3 ri = c.point - bodies[c.i].centroid();
    const Vec3 rj = c.point - bodies[c.j].centroid();
    // u = v + omega x r = v - [r x] omega.
    D.block<3, 3>(3 * k, 6 * c.i) = Mat3::Identity();
    D.block<3, 3>(3 * k, 6 * c.i + 3) = -cross_matrix(ri);
    D.block<3, 3>(3 * k, 6 * c.j) = -Mat3::Identity();
    D.block<3, 3>(3 * k, 6 * c.j + 3) = cross_matrix(rj);
  }
  return D;
}

ContactCorrection contact_forces(const std::vector<Contact>& contacts, const std::vector<ParticleSurface>& bodies,
                                 const VecX& V0, const MobilityMap& mobility) {
  if (contacts.empty()) throw ContactError("contact correction needs at least one contact");
  if (V0.size() != 6 * static_cast<Eigen::Index>(bodies.size()))
    throw InvalidArgument("velocity vector does not match the body count");
  const MatX D = contact_velocity_map(contacts, bodies);
  const MatX C = D.transpose();
  ContactCorrection out;
  out.MC.resize(C.rows(), C.cols());
  for (Eigen::Index col = 0; col < C.cols(); ++col) out.MC.col(col) = mobility(C.col(col));
  const MatX DMC = D * out.MC;
  const Eigen::FullPivLU<MatX> lu(DMC);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "contact matrix is singular for pairs";
    for (const Contact& c : contacts) msg << " (" << c.i << "," << c.j << ")";
    throw ContactError(msg.str());
  }
  out.forces = lu.solve(-D * V0);
  out.velocities = V0 + out.MC * out.forces;
  return out;
}

}  // namespace rbs::dynamics
