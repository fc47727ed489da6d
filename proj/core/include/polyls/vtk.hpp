#pragma once

#include "polyls/assembly.hpp"
#include "polyls/mesh.hpp"

#include <optional>
#include <string>

namespace polyls {

// Legacy ASCII VTK export: POLYGONS cells in 2D, POLYHEDRON cells in 3D,
// optionally with a nodal displacement vector field.
void write_vtk(const PolytopeMesh& mesh, const std::string& path,
               const DisplacementField* displacement = nullptr);

} // namespace polyls
