#include "polyls/mesh.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace polyls {

namespace {

constexpr double kDegenerateRel = 1e-14;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Triangles of a 3D face: the face itself if triangular, otherwise a fan from
// the face vertex mean.
template <class F>
void for_each_face_triangle(const ElementGeometry& elem, const std::vector<int>& face, F&& fn)
{
    const std::size_t m = face.size();
    if (m == 3) {
        fn(elem.verts[face[0]], elem.verts[face[1]], elem.verts[face[2]]);
        return;
    }
    Vec3 fm = Vec3::Zero();
    for (int id : face) fm += elem.verts[id];
    fm /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
        fn(fm, elem.verts[face[i]], elem.verts[face[(i + 1) % m]]);
}

} // namespace

std::vector<int> PolytopeMesh::facet_nodes(int element, int facet) const
{
    const Polytope& el = elements.at(element);
    if (dim == 2) {
        const int n = static_cast<int>(el.loop.size());
        return {el.loop[facet], el.loop[(facet + 1) % n]};
    }
    return el.faces.at(facet);
}

ElementGeometry make_polygon(std::vector<Vec3> verts, int index)
{
    ElementGeometry e;
    e.dim = 2;
    e.index = index;
    e.verts = std::move(verts);
    return e;
}

ElementGeometry make_polyhedron(std::vector<Vec3> verts, std::vector<std::vector<int>> faces,
                                int index)
{
    ElementGeometry e;
    e.dim = 3;
    e.index = index;
    e.verts = std::move(verts);
    e.faces = std::move(faces);
    return e;
}

ElementGeometry extract_element(const PolytopeMesh& mesh, int element)
{
    const Polytope& el = mesh.elements.at(element);
    ElementGeometry e;
    e.dim = mesh.dim;
    e.index = element;
    if (mesh.dim == 2) {
        e.global = el.loop;
        e.verts.reserve(el.loop.size());
        for (int id : el.loop) e.verts.push_back(mesh.nodes.at(id));
    } else {
        // collect the element's nodes in first-appearance order over its faces
        std::vector<int> local_of_global;
        for (const auto& face : el.faces) {
            std::vector<int> lface;
            lface.reserve(face.size());
            for (int id : face) {
                int local = -1;
                for (std::size_t k = 0; k < e.global.size(); ++k)
                    if (e.global[k] == id) { local = static_cast<int>(k); break; }
                if (local < 0) {
                    local = static_cast<int>(e.global.size());
                    e.global.push_back(id);
                    e.verts.push_back(mesh.nodes.at(id));
                }
                lface.push_back(local);
            }
            e.faces.push_back(std::move(lface));
        }
    }
    return e;
}

double element_measure(const ElementGeometry& elem)
{
    if (elem.dim == 2) return polygon_signed_area(elem.verts);
    double six_v = 0.0;
    for (const auto& face : elem.faces)
        for_each_face_triangle(elem, face, [&](const Vec3& a, const Vec3& b, const Vec3& c) {
            six_v += a.cross(b).dot(c);
        });
    return six_v / 6.0;
}

SimplexMoments simplex_moments(std::span<const Vec3> verts, int dim)
{
    SimplexMoments m;
    const double signed_measure = simplex_signed_measure(verts, dim);
    m.measure = std::abs(signed_measure);
    const double diam = diameter(verts);
    if (m.measure <= kDegenerateRel * std::pow(diam, dim))
        fail("simplex_moments: degenerate simplex");

    m.centroid = Vec3::Zero();
    for (int i = 0; i <= dim; ++i) m.centroid += verts[i];
    m.centroid /= static_cast<double>(dim + 1);

    // centroidal second moments: measure/((d+1)(d+2)) * sum_i (v_i-c)(v_i-c)^T
    const double s = m.measure / static_cast<double>((dim + 1) * (dim + 2));
    for (int i = 0; i <= dim; ++i) {
        const Vec3 r = verts[i] - m.centroid;
        m.second += s * r * r.transpose();
    }
    return m;
}

SimplexMoments polytope_moments(const ElementGeometry& elem)
{
    SimplexMoments total;
    std::vector<SimplexMoments> parts;
    const Vec3 g = elem.vertex_mean();
    if (elem.dim == 2) {
        const int n = elem.n_vertices();
        for (int i = 0; i < n; ++i) {
            const std::array<Vec3, 3> tri = {g, elem.verts[i], elem.verts[(i + 1) % n]};
            parts.push_back(simplex_moments(tri, 2));
        }
    } else {
        for (const auto& face : elem.faces)
            for_each_face_triangle(elem, face, [&](const Vec3& a, const Vec3& b, const Vec3& c) {
                const std::array<Vec3, 4> tet = {g, a, b, c};
                parts.push_back(simplex_moments(tet, 3));
            });
    }
    for (const auto& p : parts) {
        total.measure += p.measure;
        total.centroid += p.measure * p.centroid;
    }
    total.centroid /= total.measure;
    for (const auto& p : parts) {
        const Vec3 r = p.centroid - total.centroid;
        total.second += p.second + p.measure * r * r.transpose();
    }
    return total;
}

SmoothingCell make_smoothing_cell(std::span<const Vec3> verts, int dim, int parent)
{
    SmoothingCell cell;
    cell.dim = dim;
    cell.parent_element = parent;
    for (int i = 0; i <= dim; ++i) cell.verts[i] = verts[i];

    const SimplexMoments m = simplex_moments(verts, dim);
    cell.measure = m.measure;
    cell.centroid = m.centroid;
    cell.second_moments = m.second;

    if (dim == 2) {
        for (int i = 0; i < 3; ++i) {
            CellFacet& f = cell.facets[i];
            const Vec3& a = verts[i];
            const Vec3& b = verts[(i + 1) % 3];
            const Vec3& opp = verts[(i + 2) % 3];
            f.verts[0] = a;
            f.verts[1] = b;
            f.measure = (b - a).norm();
            Vec3 n((b - a).y(), -(b - a).x(), 0.0);
            n /= n.norm();
            if (n.dot(opp - a) > 0.0) n = -n;
            f.normal = n;
        }
    } else {
        static constexpr int tri[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
        for (int i = 0; i < 4; ++i) {
            CellFacet& f = cell.facets[i];
            const Vec3 a = verts[tri[i][0]], b = verts[tri[i][1]], c = verts[tri[i][2]];
            f.verts = {a, b, c};
            f.measure = 0.5 * (b - a).cross(c - a).norm();
            Vec3 n = triangle_normal(a, b, c);
            if (n.dot(verts[i] - a) > 0.0) n = -n;
            f.normal = n;
        }
    }
    return cell;
}

std::vector<SmoothingCell> subdivide_to_simplices(const ElementGeometry& elem)
{
    const Vec3 g = elem.vertex_mean();
    if (!is_star_convex(elem, g)) {
        std::ostringstream os;
        os << "subdivide_to_simplices: element " << elem.index
           << " is not star-convex about its vertex mean";
        fail(os.str());
    }

    std::vector<SmoothingCell> cells;
    if (elem.dim == 2) {
        const int n = elem.n_vertices();
        cells.reserve(n);
        for (int i = 0; i < n; ++i) {
            const std::array<Vec3, 3> tri = {g, elem.verts[i], elem.verts[(i + 1) % n]};
            cells.push_back(make_smoothing_cell(tri, 2, elem.index));
        }
    } else {
        for (const auto& face : elem.faces)
            for_each_face_triangle(elem, face, [&](const Vec3& a, const Vec3& b, const Vec3& c) {
                const std::array<Vec3, 4> tet = {g, a, b, c};
                cells.push_back(make_smoothing_cell(tet, 3, elem.index));
            });
    }

    const double measure = std::abs(element_measure(elem));
    double sum = 0.0;
    for (const auto& c : cells) sum += c.measure;
    if (std::abs(sum - measure) > 1e-12 * std::max(measure, 1e-300)) {
        std::ostringstream os;
        os << "subdivide_to_simplices: subcell measures of element " << elem.index
           << " sum to " << sum << " but the element measures " << measure;
        fail(os.str());
    }
    return cells;
}

bool is_star_convex(const ElementGeometry& elem, const Vec3& point)
{
    const double diam = elem.diameter();
    const double tol = kDegenerateRel * std::pow(diam, elem.dim);
    if (elem.dim == 2) {
        const int n = elem.n_vertices();
        for (int i = 0; i < n; ++i) {
            const std::array<Vec3, 3> tri = {point, elem.verts[i], elem.verts[(i + 1) % n]};
            if (simplex_signed_measure(tri, 2) <= tol) return false;
        }
        return true;
    }
    bool ok = true;
    for (const auto& face : elem.faces) {
        for_each_face_triangle(elem, face, [&](const Vec3& a, const Vec3& b, const Vec3& c) {
            const std::array<Vec3, 4> tet = {point, a, b, c};
            if (simplex_signed_measure(tet, 3) <= tol) ok = false;
        });
        if (!ok) return false;
    }
    return ok;
}

bool is_convex(const ElementGeometry& elem)
{
    const double diam = elem.diameter();
    if (elem.dim == 2) {
        const int n = elem.n_vertices();
        for (int i = 0; i < n; ++i) {
            const Vec3& a = elem.verts[i];
            const Vec3& b = elem.verts[(i + 1) % n];
            const Vec3& c = elem.verts[(i + 2) % n];
            if (cross2(b - a, c - b) < -1e-9 * diam * diam) return false;
        }
        return true;
    }
    // every vertex must lie on the inner side of every face plane; the slack
    // absorbs node-merging noise on clipped Voronoi cells
    for (const auto& face : elem.faces) {
        const Vec3& p0 = elem.verts[face[0]];
        Vec3 n = Vec3::Zero();
        const std::size_t m = face.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Vec3& a = elem.verts[face[i]];
            const Vec3& b = elem.verts[face[(i + 1) % m]];
            n += a.cross(b);
        }
        n.normalize();
        for (const Vec3& v : elem.verts)
            if ((v - p0).dot(n) > 1e-9 * diam) return false;
    }
    return true;
}

bool contains_point(const ElementGeometry& elem, const Vec3& x, double tol_rel)
{
    const double tol = tol_rel * elem.diameter();
    if (elem.dim == 2) {
        const int n = elem.n_vertices();
        for (int i = 0; i < n; ++i) {
            const Vec3& a = elem.verts[i];
            const Vec3& b = elem.verts[(i + 1) % n];
            if (cross2(b - a, x - a) < -tol * (b - a).norm()) return false;
        }
        return true;
    }
    for (const auto& face : elem.faces) {
        Vec3 n = Vec3::Zero();
        const std::size_t m = face.size();
        for (std::size_t i = 0; i < m; ++i)
            n += elem.verts[face[i]].cross(elem.verts[face[(i + 1) % m]]);
        n.normalize();
        if ((x - elem.verts[face[0]]).dot(n) > tol) return false;
    }
    return true;
}

namespace {

bool segments_properly_intersect(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d)
{
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

void validate_element_2d(const PolytopeMesh& mesh, int e)
{
    const auto& loop = mesh.elements[e].loop;
    const int n = static_cast<int>(loop.size());
    if (n < 3) fail("mesh: element " + std::to_string(e) + " has fewer than 3 vertices");
    for (int id : loop)
        if (id < 0 || id >= mesh.n_nodes())
            fail("mesh: element " + std::to_string(e) + " references missing node");

    ElementGeometry g = extract_element(mesh, e);
    if (polygon_signed_area(g.verts) <= 0.0)
        fail("mesh: element " + std::to_string(e) + " loop is not counter-clockwise");

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(g.verts[i], g.verts[(i + 1) % n], g.verts[j],
                                            g.verts[(j + 1) % n]))
                fail("mesh: element " + std::to_string(e) + " loop self-intersects");
        }
}

void validate_element_3d(const PolytopeMesh& mesh, int e)
{
    const auto& el = mesh.elements[e];
    if (el.faces.size() < 4) fail("mesh: element " + std::to_string(e) + " has fewer than 4 faces");
    for (const auto& face : el.faces) {
        if (face.size() < 3) fail("mesh: element " + std::to_string(e) + " has a degenerate face");
        for (int id : face)
            if (id < 0 || id >= mesh.n_nodes())
                fail("mesh: element " + std::to_string(e) + " references missing node");
    }

    ElementGeometry g = extract_element(mesh, e);
    const double diam = g.diameter();
    const Vec3 mean = g.vertex_mean();

    for (std::size_t f = 0; f < g.faces.size(); ++f) {
        const auto& face = g.faces[f];
        Vec3 n = Vec3::Zero();
        const std::size_t m = face.size();
        for (std::size_t i = 0; i < m; ++i)
            n += g.verts[face[i]].cross(g.verts[face[(i + 1) % m]]);
        const double len = n.norm();
        if (len <= 0.0) fail("mesh: element " + std::to_string(e) + " has a zero-area face");
        n /= len;
        const Vec3& p0 = g.verts[face[0]];
        for (int id : face)
            if (std::abs((g.verts[id] - p0).dot(n)) > 1e-10 * diam)
                fail("mesh: element " + std::to_string(e) + " face " + std::to_string(f) +
                     " is not planar");
        if ((p0 - mean).dot(n) <= 0.0)
            fail("mesh: element " + std::to_string(e) + " face " + std::to_string(f) +
                 " is not outward-oriented");
    }
}

} // namespace

void validate_mesh(const PolytopeMesh& mesh, std::optional<double> expected_measure)
{
    if (mesh.dim != 2 && mesh.dim != 3) fail("mesh: dimension must be 2 or 3");
    double total = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        if (mesh.dim == 2)
            validate_element_2d(mesh, e);
        else
            validate_element_3d(mesh, e);
        total += std::abs(element_measure(extract_element(mesh, e)));
    }
    if (expected_measure) {
        if (std::abs(total - *expected_measure) > 1e-10 * *expected_measure)
            fail("mesh: element measures sum to " + std::to_string(total) +
                 ", expected " + std::to_string(*expected_measure));
    }
    for (const auto& bf : mesh.boundary) {
        if (bf.element < 0 || bf.element >= mesh.n_elements())
            fail("mesh: boundary facet references missing element");
        const auto& el = mesh.elements[bf.element];
        const int nf = mesh.dim == 2 ? static_cast<int>(el.loop.size())
                                     : static_cast<int>(el.faces.size());
        if (bf.facet < 0 || bf.facet >= nf)
            fail("mesh: boundary facet index out of range");
    }
}

} // namespace polyls
