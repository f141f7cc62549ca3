#include "rbs/app/output.hpp"

#include <fstream>
#include <iomanip>

#include "rbs/errors.hpp"

namespace rbs::app {

void write_trajectory_header(std::ostream& out) { out << kTrajectoryHeader << "\n"; }

void write_trajectory_record(std::ostream& out, const TrajectoryRecord& r) {
  out << std::setprecision(17) << r.t << ',' << r.body;
  for (int i = 0; i < 3; ++i) out << ',' << r.centroid(i);
  out << ',' << r.orientation.w() << ',' << r.orientation.x() << ',' << r.orientation.y() << ',' << r.orientation.z();
  for (int i = 0; i < 3; ++i) out << ',' << r.v(i);
  for (int i = 0; i < 3; ++i) out << ',' << r.omega(i);
  out << ',' << r.iterations << ',' << r.residual << '\n';
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file " + path);
  write_trajectory_header(out);
  for (const auto& r : records) write_trajectory_record(out, r);
}

VecX density_magnitude(const VecX& density) {
  const Eigen::Index m = density.size() / 3;
  return Eigen::Map<const PointSet>(density.data(), m, 3).rowwise().norm();
}

void write_vtk_surfaces(std::ostream& out, const std::vector<surface::ParticleSurface>& bodies, const VecX& scalar,
                        const std::string& scalar_name) {
  Eigen::Index npts = 0;
  for (const auto& b : bodies) npts += b.node_count() + 2;
  Eigen::Index nodes = 0;
  for (const auto& b : bodies) nodes += b.node_count();
  if (scalar.size() != nodes) throw InvalidArgument("one scalar per surface node is required");

  out << "# vtk DataFile Version 3.0\nrigid body surfaces\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << npts << " double\n" << std::setprecision(12);
  std::vector<double> values;
  Eigen::Index s = 0;
  for (const auto& b : bodies) {
    for (int i = 0; i < b.node_count(); ++i) {
      out << b.positions()(i, 0) << ' ' << b.positions()(i, 1) << ' ' << b.positions()(i, 2) << '\n';
      values.push_back(scalar(s + i));
    }
    // Pole points: averages of the first and last rings.
    const surface::SphericalGrid& g = b.grid();
    for (int pole = 0; pole < 2; ++pole) {
      const int j = pole == 0 ? 0 : g.n_theta() - 1;
      Vec3 c = Vec3::Zero();
      double v = 0.0;
      for (int k = 0; k < g.n_phi(); ++k) {
        c += b.positions().row(g.index(j, k)).transpose();
        v += scalar(s + g.index(j, k));
      }
      c /= g.n_phi();
      out << c(0) << ' ' << c(1) << ' ' << c(2) << '\n';
      values.push_back(v / g.n_phi());
    }
    s += b.node_count();
  }

  std::vector<std::vector<Eigen::Index>> polys;
  Eigen::Index base = 0;
  for (const auto& b : bodies) {
    const surface::SphericalGrid& g = b.grid();
    const int np = g.n_phi();
    for (int j = 0; j + 1 < g.n_theta(); ++j)
      for (int k = 0; k < np; ++k)
        polys.push_back({base + g.index(j, k), base + g.index(j + 1, k), base + g.index(j + 1, (k + 1) % np),
                         base + g.index(j, (k + 1) % np)});
    const Eigen::Index north = base + b.node_count(), south = north + 1;
    const int last = g.n_theta() - 1;
    for (int k = 0; k < np; ++k) {
      polys.push_back({north, base + g.index(0, k), base + g.index(0, (k + 1) % np)});
      polys.push_back({south, base + g.index(last, (k + 1) % np), base + g.index(last, k)});
    }
    base += b.node_count() + 2;
  }
  size_t entries = 0;
  for (const auto& p : polys) entries += p.size() + 1;
  out << "POLYGONS " << polys.size() << ' ' << entries << '\n';
  for (const auto& p : polys) {
    out << p.size();
    for (Eigen::Index q : p) out << ' ' << q;
    out << '\n';
  }
  out << "POINT_DATA " << npts << "\nSCALARS " << scalar_name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : values) out << v << '\n';
}

void write_vtk_surfaces(const std::string& path, const std::vector<surface::ParticleSurface>& bodies, const VecX& scalar,
                        const std::string& scalar_name) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write surface file " + path);
  write_vtk_surfaces(out, bodies, scalar, scalar_name);
}

}  // namespace rbs::app
