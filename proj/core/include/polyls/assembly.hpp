#pragma once

#include "polyls/material.hpp"
#include "polyls/mesh.hpp"
#include "polyls/smoothing.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace polyls {

using VectorField = std::function<Vec3(const Vec3&)>;

struct NodalConstraint {
    std::array<bool, 3> mask = {false, false, false};
    Vec3 value = Vec3::Zero();
};

// Dirichlet data per node plus traction fields per boundary facet. Facets
// carrying tractions and facets whose nodes are constrained partition the
// tagged boundary of the benchmark problems.
struct BoundaryCondition {
    std::map<int, NodalConstraint> dirichlet;
    std::vector<std::pair<BoundaryFacet, VectorField>> neumann;
};

// Prescribe u at every node of every boundary facet whose tag is in `tags`
// (all boundary facets when empty). `mask` selects the constrained components.
void dirichlet_on_tags(const PolytopeMesh& mesh, const std::vector<std::string>& tags,
                       const VectorField& u, BoundaryCondition& bc,
                       const std::array<bool, 3>& mask = {true, true, true});

void traction_on_tags(const PolytopeMesh& mesh, const std::vector<std::string>& tags,
                      const VectorField& t, BoundaryCondition& bc);

struct GlobalSystem {
    int dim = 2;
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd f;
    long interior_points = 0;       // interior evaluation points over all elements
    double stiffness_seconds = 0.0; // element-matrix formation wall time
};

// Deterministic assembly: fixed element order and fixed-order scatter-add, so
// repeated runs are bit-identical. Tractions use 2-point Gauss per boundary
// edge in 2D and a 3-point rule per boundary face triangle in 3D.
GlobalSystem assemble(const PolytopeMesh& mesh, const Material& mat, Scheme scheme,
                      const BodyForce& body_force, const BoundaryCondition& bc,
                      const SmoothingOptions& opts = {});

struct DisplacementField {
    int dim = 2;
    Eigen::VectorXd values; // dim * n_nodes, interleaved per node

    Vec3 at(int node) const
    {
        Vec3 u = Vec3::Zero();
        for (int c = 0; c < dim; ++c) u[c] = values[dim * node + c];
        return u;
    }
};

// Dirichlet imposition by row/column elimination with symmetric right-hand
// side correction, then a direct SPD factorization. Throws when the
// constrained matrix is singular or indefinite, reporting the smallest pivot.
DisplacementField solve(const GlobalSystem& system, const BoundaryCondition& bc);

// 1/2 u^T K u with the unconstrained stiffness.
double strain_energy(const DisplacementField& u, const GlobalSystem& system_before_bc);

// Nodal interpolant of a smooth field.
DisplacementField interpolate(const PolytopeMesh& mesh, const VectorField& u);

} // namespace polyls
