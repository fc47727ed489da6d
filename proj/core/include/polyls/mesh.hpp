#pragma once

#include "polyls/geometry.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace polyls {

// One element: 2D elements store a CCW vertex loop, 3D elements a list of
// planar faces, each an outward-oriented vertex loop.
struct Polytope {
    std::vector<int> loop;
    std::vector<std::vector<int>> faces;
};

struct BoundaryFacet {
    int element = -1;
    int facet = -1; // 2D: edge index i -> (loop[i], loop[i+1]); 3D: face index
    std::string tag;
};

struct PolytopeMesh {
    int dim = 2;
    std::vector<Vec3> nodes;
    std::vector<Polytope> elements;
    std::vector<BoundaryFacet> boundary;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }

    // Global node ids of a local facet (2D edge or 3D face).
    std::vector<int> facet_nodes(int element, int facet) const;
};

// Element geometry unpacked into local coordinates; the unit all per-element
// algorithms operate on. 2D vertices are in CCW order.
struct ElementGeometry {
    int dim = 2;
    int index = -1;
    std::vector<Vec3> verts;
    std::vector<std::vector<int>> faces; // 3D only, local indices
    std::vector<int> global;             // global node ids, empty for synthetic elements

    Vec3 vertex_mean() const { return polyls::vertex_mean(verts); }
    double diameter() const { return polyls::diameter(verts); }
    int n_vertices() const { return static_cast<int>(verts.size()); }
};

ElementGeometry make_polygon(std::vector<Vec3> verts, int index = -1);
ElementGeometry make_polyhedron(std::vector<Vec3> verts, std::vector<std::vector<int>> faces,
                                int index = -1);
ElementGeometry extract_element(const PolytopeMesh& mesh, int element);

// Measure of the element: shoelace area in 2D, divergence-theorem volume in 3D.
double element_measure(const ElementGeometry& elem);

struct SimplexMoments {
    double measure = 0.0;
    Vec3 centroid = Vec3::Zero();
    Mat3 second = Mat3::Zero(); // centroid-referenced second moments
};

// Exact measure, centroid and centroidal second moments of a d-simplex.
// Throws on degenerate input.
SimplexMoments simplex_moments(std::span<const Vec3> verts, int dim);

// Measure, centroid and centroidal second moments of a star-convex polytope,
// accumulated over its fan subdivision.
SimplexMoments polytope_moments(const ElementGeometry& elem);

struct CellFacet {
    std::array<Vec3, 3> verts{}; // 2D facets use the first two entries
    Vec3 normal = Vec3::Zero();  // unit outward
    double measure = 0.0;
};

// A simplex subcell of the centroid-fan subdivision, used purely for
// integration; it introduces no degrees of freedom.
struct SmoothingCell {
    int dim = 2;
    int parent_element = -1;
    std::array<Vec3, 4> verts{};
    double measure = 0.0;
    Vec3 centroid = Vec3::Zero();
    Mat3 second_moments = Mat3::Zero();
    std::array<CellFacet, 4> facets{};

    int n_facets() const { return dim + 1; }
};

SmoothingCell make_smoothing_cell(std::span<const Vec3> verts, int dim, int parent = -1);

// Centroid-fan subdivision: triangles from the vertex mean (one per edge) in
// 2D; tetrahedra from the vertex mean, one per triangulated face triangle, in
// 3D. Faces with more than three vertices are fanned from their vertex mean.
std::vector<SmoothingCell> subdivide_to_simplices(const ElementGeometry& elem);

// True iff every fan simplex from `point` has strictly positive signed measure.
bool is_star_convex(const ElementGeometry& elem, const Vec3& point);

// True iff the polygon/polyhedron is convex (within a relative tolerance).
bool is_convex(const ElementGeometry& elem);

// Point-in-element test for convex elements (closure, with relative slack).
bool contains_point(const ElementGeometry& elem, const Vec3& x, double tol_rel = 1e-10);

// Structural and geometric validation; throws std::runtime_error mentioning
// the offending element on failure. If `expected_measure` is given, also
// checks that element measures sum to it within 1e-10 relative.
void validate_mesh(const PolytopeMesh& mesh,
                   std::optional<double> expected_measure = std::nullopt);

} // namespace polyls
