#pragma once

#include "polyls/mesh.hpp"

#include <string>

namespace polyls {

// Plain JSON mesh format: "dimension", "nodes", "elements" (vertex loops in
// 2D, {"faces": [...]} objects in 3D) and a "boundary" section of tagged
// facets.
void write_mesh_json(const PolytopeMesh& mesh, const std::string& path);
PolytopeMesh read_mesh_json(const std::string& path);

} // namespace polyls
