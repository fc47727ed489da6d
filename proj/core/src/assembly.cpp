#include "polyls/assembly.hpp"

#include "polyls/quadrature.hpp"
#include "polyls/wachspress.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

namespace polyls {

namespace {

bool tag_selected(const std::vector<std::string>& tags, const std::string& tag)
{
    if (tags.empty()) return true;
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

// Quadrature points of a boundary facet: 2-point Gauss per edge in 2D, a
// 3-point rule per face triangle in 3D (faces fanned from their vertex mean).
QuadRule boundary_facet_rule(const PolytopeMesh& mesh, const BoundaryFacet& bf)
{
    const auto nodes = mesh.facet_nodes(bf.element, bf.facet);
    if (mesh.dim == 2) return segment_rule(mesh.nodes[nodes[0]], mesh.nodes[nodes[1]], 2);

    QuadRule rule;
    const std::size_t m = nodes.size();
    if (m == 3) return facet_triangle_rule3(mesh.nodes[nodes[0]], mesh.nodes[nodes[1]],
                                            mesh.nodes[nodes[2]]);
    Vec3 fm = Vec3::Zero();
    for (int id : nodes) fm += mesh.nodes[id];
    fm /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        QuadRule tri = facet_triangle_rule3(fm, mesh.nodes[nodes[i]], mesh.nodes[nodes[(i + 1) % m]]);
        rule.insert(rule.end(), tri.begin(), tri.end());
    }
    return rule;
}

} // namespace

void dirichlet_on_tags(const PolytopeMesh& mesh, const std::vector<std::string>& tags,
                       const VectorField& u, BoundaryCondition& bc,
                       const std::array<bool, 3>& mask)
{
    for (const BoundaryFacet& bf : mesh.boundary) {
        if (!tag_selected(tags, bf.tag)) continue;
        for (int node : mesh.facet_nodes(bf.element, bf.facet)) {
            NodalConstraint& c = bc.dirichlet[node];
            const Vec3 val = u(mesh.nodes[node]);
            for (int k = 0; k < 3; ++k)
                if (mask[k]) {
                    c.mask[k] = true;
                    c.value[k] = val[k];
                }
        }
    }
}

void traction_on_tags(const PolytopeMesh& mesh, const std::vector<std::string>& tags,
                      const VectorField& t, BoundaryCondition& bc)
{
    for (const BoundaryFacet& bf : mesh.boundary)
        if (tag_selected(tags, bf.tag)) bc.neumann.emplace_back(bf, t);
}

GlobalSystem assemble(const PolytopeMesh& mesh, const Material& mat, Scheme scheme,
                      const BodyForce& body_force, const BoundaryCondition& bc,
                      const SmoothingOptions& opts)
{
    GlobalSystem sys;
    sys.dim = mesh.dim;
    const int dim = mesh.dim;
    const int ndof = dim * mesh.n_nodes();
    sys.f = Eigen::VectorXd::Zero(ndof);

    std::vector<Eigen::Triplet<double>> triplets;
    const auto t0 = std::chrono::steady_clock::now();
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const ElementGeometry elem = extract_element(mesh, e);
        const WachspressBasis basis(elem);
        ElementStiffness es;
        try {
            es = element_stiffness(elem, basis, mat, scheme, opts);
        } catch (const std::exception& ex) {
            throw std::runtime_error("assemble: element " + std::to_string(e) + ": " + ex.what());
        }
        sys.interior_points += es.interior_points;

        const int n = elem.n_vertices();
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < dim; ++i)
                for (int b = 0; b < n; ++b)
                    for (int j = 0; j < dim; ++j)
                        triplets.emplace_back(dim * elem.global[a] + i, dim * elem.global[b] + j,
                                              es.K(dim * a + i, dim * b + j));

        if (body_force) {
            const Eigen::VectorXd fe = body_force_vector(elem, basis, body_force, scheme, opts);
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < dim; ++i) sys.f[dim * elem.global[a] + i] += fe[dim * a + i];
        }
    }
    sys.stiffness_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    sys.K.resize(ndof, ndof);
    sys.K.setFromTriplets(triplets.begin(), triplets.end());

    // tractions
    for (const auto& [bf, field] : bc.neumann) {
        const ElementGeometry elem = extract_element(mesh, bf.element);
        const WachspressBasis basis(elem);
        Eigen::VectorXd phi;
        for (const QuadPoint& qp : boundary_facet_rule(mesh, bf)) {
            basis.values(qp.x, phi);
            const Vec3 tr = field(qp.x);
            for (int a = 0; a < elem.n_vertices(); ++a)
                for (int i = 0; i < dim; ++i)
                    sys.f[dim * elem.global[a] + i] += qp.w * phi[a] * tr[i];
        }
    }
    return sys;
}

DisplacementField solve(const GlobalSystem& system, const BoundaryCondition& bc)
{
    const int dim = system.dim;
    const int ndof = static_cast<int>(system.K.rows());

    std::vector<char> fixed(ndof, 0);
    Eigen::VectorXd prescribed = Eigen::VectorXd::Zero(ndof);
    for (const auto& [node, c] : bc.dirichlet)
        for (int k = 0; k < dim; ++k)
            if (c.mask[k]) {
                fixed[dim * node + k] = 1;
                prescribed[dim * node + k] = c.value[k];
            }

    std::vector<int> free_index(ndof, -1);
    int nfree = 0;
    for (int i = 0; i < ndof; ++i)
        if (!fixed[i]) free_index[i] = nfree++;

    // rhs correction f_f - K_fc * u_c, then the free-free block
    Eigen::VectorXd rhs_full = system.f - system.K * prescribed;
    Eigen::VectorXd rhs(nfree);
    for (int i = 0; i < ndof; ++i)
        if (!fixed[i]) rhs[free_index[i]] = rhs_full[i];

    std::vector<Eigen::Triplet<double>> triplets;
    for (int col = 0; col < ndof; ++col) {
        if (fixed[col]) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.K, col); it; ++it) {
            if (fixed[it.row()]) continue;
            triplets.emplace_back(free_index[it.row()], free_index[col], it.value());
        }
    }
    Eigen::SparseMatrix<double> Kff(nfree, nfree);
    Kff.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kff);
    double min_pivot = 0.0;
    bool ok = ldlt.info() == Eigen::Success;
    if (ok && nfree > 0) {
        min_pivot = ldlt.vectorD().minCoeff();
        ok = min_pivot > 0.0;
    }
    if (!ok) {
        long near_zero = 0;
        if (ldlt.info() == Eigen::Success) {
            const double dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
            near_zero = (ldlt.vectorD().array().abs() <= 1e-12 * dmax).count();
        }
        std::ostringstream os;
        os << "solve: constrained stiffness is singular or indefinite (smallest pivot "
           << min_pivot << ", " << near_zero
           << " near-zero pivots); the system likely retains rigid-body modes";
        throw std::runtime_error(os.str());
    }

    Eigen::VectorXd uf = nfree > 0 ? Eigen::VectorXd(ldlt.solve(rhs)) : Eigen::VectorXd(0);
    if (nfree > 0) {
        // one step of iterative refinement, then enforce the residual contract
        uf += ldlt.solve(rhs - Kff * uf);
        const double fnorm = rhs.norm();
        const double res = (Kff * uf - rhs).norm();
        if (res > 1e-10 * std::max(fnorm, 1e-30) && res > 1e-14 * Kff.coeffs().cwiseAbs().maxCoeff())
            throw std::runtime_error("solve: direct solve failed the residual contract");
    }

    DisplacementField u;
    u.dim = dim;
    u.values = prescribed;
    for (int i = 0; i < ndof; ++i)
        if (!fixed[i]) u.values[i] = uf[free_index[i]];
    return u;
}

double strain_energy(const DisplacementField& u, const GlobalSystem& system_before_bc)
{
    return 0.5 * u.values.dot(system_before_bc.K * u.values);
}

DisplacementField interpolate(const PolytopeMesh& mesh, const VectorField& u)
{
    DisplacementField f;
    f.dim = mesh.dim;
    f.values.resize(mesh.dim * mesh.n_nodes());
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        const Vec3 v = u(mesh.nodes[n]);
        for (int c = 0; c < mesh.dim; ++c) f.values[mesh.dim * n + c] = v[c];
    }
    return f;
}

} // namespace polyls
