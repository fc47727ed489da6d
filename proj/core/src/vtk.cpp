#include "polyls/vtk.hpp"

#include <fstream>
#include <stdexcept>

namespace polyls {

void write_vtk(const PolytopeMesh& mesh, const std::string& path,
               const DisplacementField* displacement)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("vtk: cannot open '" + path + "' for writing");
    os.precision(17);

    os << "# vtk DataFile Version 3.0\n";
    os << "polyls mesh\n";
    os << "ASCII\n";

    if (mesh.dim == 2) {
        os << "DATASET POLYDATA\n";
        os << "POINTS " << mesh.n_nodes() << " double\n";
        for (const Vec3& p : mesh.nodes) os << p.x() << " " << p.y() << " 0\n";
        std::size_t sz = 0;
        for (const Polytope& el : mesh.elements) sz += el.loop.size() + 1;
        os << "POLYGONS " << mesh.n_elements() << " " << sz << "\n";
        for (const Polytope& el : mesh.elements) {
            os << el.loop.size();
            for (int id : el.loop) os << " " << id;
            os << "\n";
        }
    } else {
        os << "DATASET UNSTRUCTURED_GRID\n";
        os << "POINTS " << mesh.n_nodes() << " double\n";
        for (const Vec3& p : mesh.nodes) os << p.x() << " " << p.y() << " " << p.z() << "\n";
        std::size_t sz = 0;
        for (const Polytope& el : mesh.elements) {
            sz += 2; // entry count + face count
            for (const auto& f : el.faces) sz += f.size() + 1;
        }
        os << "CELLS " << mesh.n_elements() << " " << sz << "\n";
        for (const Polytope& el : mesh.elements) {
            std::size_t entries = 1;
            for (const auto& f : el.faces) entries += f.size() + 1;
            os << entries << " " << el.faces.size();
            for (const auto& f : el.faces) {
                os << " " << f.size();
                for (int id : f) os << " " << id;
            }
            os << "\n";
        }
        os << "CELL_TYPES " << mesh.n_elements() << "\n";
        for (int e = 0; e < mesh.n_elements(); ++e) os << "42\n"; // VTK_POLYHEDRON
    }

    if (displacement) {
        os << "POINT_DATA " << mesh.n_nodes() << "\n";
        os << "VECTORS displacement double\n";
        for (int n = 0; n < mesh.n_nodes(); ++n) {
            const Vec3 u = displacement->at(n);
            os << u.x() << " " << u.y() << " " << u.z() << "\n";
        }
    }
}

} // namespace polyls
