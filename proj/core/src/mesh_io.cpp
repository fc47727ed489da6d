#include "polyls/mesh_io.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace polyls {

using nlohmann::json;

void write_mesh_json(const PolytopeMesh& mesh, const std::string& path)
{
    json j;
    j["dimension"] = mesh.dim;
    json nodes = json::array();
    for (const Vec3& p : mesh.nodes) {
        if (mesh.dim == 2)
            nodes.push_back({p.x(), p.y()});
        else
            nodes.push_back({p.x(), p.y(), p.z()});
    }
    j["nodes"] = std::move(nodes);

    json elems = json::array();
    for (const Polytope& el : mesh.elements) {
        if (mesh.dim == 2)
            elems.push_back(el.loop);
        else
            elems.push_back(json{{"faces", el.faces}});
    }
    j["elements"] = std::move(elems);

    json boundary = json::array();
    for (const BoundaryFacet& bf : mesh.boundary)
        boundary.push_back({{"element", bf.element}, {"facet", bf.facet}, {"tag", bf.tag}});
    j["boundary"] = std::move(boundary);

    std::ofstream os(path);
    if (!os) throw std::runtime_error("mesh_io: cannot open '" + path + "' for writing");
    os << j.dump(1, '\t') << "\n";
}

PolytopeMesh read_mesh_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("mesh_io: cannot open '" + path + "'");
    json j;
    is >> j;

    PolytopeMesh mesh;
    mesh.dim = j.at("dimension").get<int>();
    for (const auto& jp : j.at("nodes")) {
        Vec3 p = Vec3::Zero();
        for (std::size_t a = 0; a < jp.size() && a < 3; ++a) p[static_cast<int>(a)] = jp[a];
        mesh.nodes.push_back(p);
    }
    for (const auto& je : j.at("elements")) {
        Polytope el;
        if (mesh.dim == 2)
            el.loop = je.get<std::vector<int>>();
        else
            el.faces = je.at("faces").get<std::vector<std::vector<int>>>();
        mesh.elements.push_back(std::move(el));
    }
    if (j.contains("boundary"))
        for (const auto& jb : j.at("boundary"))
            mesh.boundary.push_back({jb.at("element").get<int>(), jb.at("facet").get<int>(),
                                     jb.at("tag").get<std::string>()});
    validate_mesh(mesh);
    return mesh;
}

} // namespace polyls
