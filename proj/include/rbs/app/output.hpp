#ifndef RBS_APP_OUTPUT_HPP
#define RBS_APP_OUTPUT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "rbs/app/scenario.hpp"

namespace rbs::app {

inline constexpr const char* kTrajectoryHeader =
    "t,body,cx,cy,cz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,iters,residual";

void write_trajectory_header(std::ostream& out);
void write_trajectory_record(std::ostream& out, const TrajectoryRecord& r);
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records);

/// Legacy VTK polydata of all bodies: grid quads, triangle fans closing the
/// poles, and one point scalar per node.
void write_vtk_surfaces(std::ostream& out, const std::vector<surface::ParticleSurface>& bodies, const VecX& scalar,
                        const std::string& scalar_name = "force_density");
void write_vtk_surfaces(const std::string& path, const std::vector<surface::ParticleSurface>& bodies,
                        const VecX& scalar, const std::string& scalar_name = "force_density");

/// |rho + mu| per node from a stacked 3-component density.
VecX density_magnitude(const VecX& density);

}  // namespace rbs::app

#endif
