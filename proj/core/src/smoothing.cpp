#include "polyls/smoothing.hpp"

#include "polyls/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace polyls {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("smoothing: " + msg); }

QuadRule facet_rule(const SmoothingCell& cell, int facet, const SmoothingOptions& opts)
{
    const CellFacet& f = cell.facets[facet];
    if (cell.dim == 2) return segment_rule(f.verts[0], f.verts[1], std::max(2, opts.boundary_order));
    if (opts.boundary_order <= 2) return facet_triangle_rule3(f.verts[0], f.verts[1], f.verts[2]);
    return triangle_rule(f.verts[0], f.verts[1], f.verts[2], opts.boundary_order);
}

// tr(H * I) with the Hessian stored as (xx, yy, zz, xy, yz, xz)
double contract_hessian(const Eigen::MatrixXd& hess, int row, const Mat3& I)
{
    return hess(row, HXX) * I(0, 0) + hess(row, HYY) * I(1, 1) + hess(row, HZZ) * I(2, 2) +
           2.0 * hess(row, HXY) * I(0, 1) + 2.0 * hess(row, HYZ) * I(1, 2) +
           2.0 * hess(row, HXZ) * I(0, 2);
}

// Boundary-integral rows in centroid-local coordinates, without the domain
// term: Fb[j](I, k) = sum over facet Gauss points of phi_I q_k n_j w with
// q = (1, x-x_c, ...). All smoothing schemes share these.
std::array<Eigen::MatrixXd, 3> boundary_moments(const SmoothingCell& cell,
                                                const WachspressBasis& basis,
                                                const SmoothingOptions& opts)
{
    const int dim = cell.dim;
    const int m = dim + 1;
    const int n = basis.size();
    std::array<Eigen::MatrixXd, 3> Fb;
    for (int j = 0; j < dim; ++j) Fb[j] = Eigen::MatrixXd::Zero(n, m);

    Eigen::VectorXd phi;
    for (int facet = 0; facet < cell.n_facets(); ++facet) {
        const Vec3 normal = cell.facets[facet].normal;
        for (const QuadPoint& qp : facet_rule(cell, facet, opts)) {
            basis.values(qp.x, phi);
            const Vec3 q_local = qp.x - cell.centroid;
            for (int j = 0; j < dim; ++j) {
                const double nw = normal[j] * qp.w;
                if (nw == 0.0) continue;
                Fb[j].col(0) += nw * phi;
                for (int k = 0; k < dim; ++k) Fb[j].col(1 + k) += nw * q_local[k] * phi;
            }
        }
    }
    return Fb;
}

// Taylor-expanded domain term per node: A*phi_I(x_c) + 1/2 tr(Hess phi_I * I_c).
Eigen::VectorXd domain_term(const SmoothingCell& cell, const BasisEval& at_centroid)
{
    const int n = static_cast<int>(at_centroid.values.size());
    Eigen::VectorXd fg(n);
    for (int i = 0; i < n; ++i)
        fg[i] = cell.measure * at_centroid.values[i] +
                0.5 * contract_hessian(at_centroid.hessians, i, cell.second_moments);
    return fg;
}

Eigen::LLT<Eigen::MatrixXd> moment_solver(const SmoothingCell& cell)
{
    const int dim = cell.dim;
    const Eigen::MatrixXd I = cell.second_moments.topLeftCorner(dim, dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(I);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        fail("degenerate smoothing cell in element " + std::to_string(cell.parent_element) +
             " (moment matrix condition > 1e12)");
    return Eigen::LLT<Eigen::MatrixXd>(I);
}

QuadRule interior_rule(const SmoothingCell& cell)
{
    if (cell.dim == 2)
        return triangle_rule_interior3(cell.verts[0], cell.verts[1], cell.verts[2]);
    return tetrahedron_rule_interior4(cell.verts[0], cell.verts[1], cell.verts[2], cell.verts[3]);
}

int scatter_dofs(const ElementGeometry& elem) { return elem.dim * elem.n_vertices(); }

void check_scheme(const ElementGeometry& elem, const Material& mat, Scheme scheme)
{
    if (mat.dim() != elem.dim) fail("material model dimension does not match the element");
    if (scheme == Scheme::CS && elem.dim != 2) fail("CS smoothing is 2D only");
}

// K accumulation for one subcell of the LS1 scheme: the Taylor-expanded
// bilinear form integrates exactly against the subcell moments, the
// first-moment cross terms vanishing about the centroid.
void accumulate_ls1(const SmoothingCell& cell, const ModifiedB& mb, const Eigen::MatrixXd& C,
                    Eigen::MatrixXd& K)
{
    K.noalias() += cell.measure * mb.B.transpose() * C * mb.B;
    for (int j = 0; j < cell.dim; ++j)
        for (int k = 0; k < cell.dim; ++k) {
            const double I = cell.second_moments(j, k);
            if (I == 0.0) continue;
            K.noalias() += I * mb.dB[j].transpose() * C * mb.dB[k];
        }
}

void place_block(Eigen::MatrixXd& B, std::array<Eigen::MatrixXd, 3>* dB, const SmoothedBasis& sb,
                 int col)
{
    const int dim = sb.dim;
    const int n = static_cast<int>(sb.d[0].rows());
    const int voigt = dim == 2 ? 3 : 6;
    B = Eigen::MatrixXd::Zero(voigt, dim * n);
    if (dB)
        for (int k = 0; k < dim; ++k) (*dB)[k] = Eigen::MatrixXd::Zero(voigt, dim * n);

    auto fill = [&](Eigen::MatrixXd& M, int c) {
        for (int I = 0; I < n; ++I) {
            const double dx = sb.d[0](I, c);
            const double dy = sb.d[1](I, c);
            if (dim == 2) {
                M(0, 2 * I) = dx;
                M(1, 2 * I + 1) = dy;
                M(2, 2 * I) = dy;
                M(2, 2 * I + 1) = dx;
            } else {
                const double dz = sb.d[2](I, c);
                M(0, 3 * I) = dx;
                M(1, 3 * I + 1) = dy;
                M(2, 3 * I + 2) = dz;
                M(3, 3 * I) = dy;
                M(3, 3 * I + 1) = dx;
                M(4, 3 * I + 1) = dz;
                M(4, 3 * I + 2) = dy;
                M(5, 3 * I) = dz;
                M(5, 3 * I + 2) = dx;
            }
        }
    };
    fill(B, col);
    if (dB)
        for (int k = 0; k < dim; ++k) fill((*dB)[k], col + 1 + k);
}

} // namespace

const char* scheme_name(Scheme s)
{
    switch (s) {
        case Scheme::CS: return "cs";
        case Scheme::LS3n: return "ls3n";
        case Scheme::LS1: return "ls1";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name)
{
    if (name == "cs") return Scheme::CS;
    if (name == "ls3n") return Scheme::LS3n;
    if (name == "ls1") return Scheme::LS1;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected cs, ls3n or ls1)");
}

Eigen::MatrixXd assemble_W(const SmoothingCell& cell)
{
    const int dim = cell.dim;
    const int m = dim + 1;
    const double A = cell.measure;

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    W(0, 0) = A;
    for (int k = 0; k < dim; ++k) {
        W(1 + k, 0) = A * cell.centroid[k];
        for (int l = 0; l < dim; ++l) W(1 + k, 1 + l) = cell.second_moments(k, l);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 0.0) || svd.singularValues().maxCoeff() / smin > 1e12)
        fail("degenerate smoothing cell in element " + std::to_string(cell.parent_element) +
             " (condition estimate of W exceeds 1e12)");
    return W;
}

Eigen::VectorXd assemble_f(const SmoothingCell& cell, const WachspressBasis& basis, int node,
                           int direction, const SmoothingOptions& opts)
{
    const int dim = cell.dim;
    if (node < 0 || node >= basis.size()) fail("assemble_f: node index out of range");
    if (direction < 0 || direction >= dim) fail("assemble_f: bad direction");

    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim + 1);
    Eigen::VectorXd phi;
    for (int facet = 0; facet < cell.n_facets(); ++facet) {
        const Vec3 normal = cell.facets[facet].normal;
        for (const QuadPoint& qp : facet_rule(cell, facet, opts)) {
            basis.values(qp.x, phi);
            const double base = phi[node] * normal[direction] * qp.w;
            f[0] += base;
            for (int k = 0; k < dim; ++k) f[1 + k] += base * qp.x[k];
        }
    }
    const BasisEval at_c = basis.eval(cell.centroid);
    f[1 + direction] -= cell.measure * at_c.values[node] +
                        0.5 * contract_hessian(at_c.hessians, node, cell.second_moments);
    return f;
}

SmoothedBasis smoothed_basis(const SmoothingCell& cell, const WachspressBasis& basis,
                             const SmoothingOptions& opts)
{
    const int dim = cell.dim;
    const int n = basis.size();

    auto Fb = boundary_moments(cell, basis, opts);
    const BasisEval at_c = basis.eval(cell.centroid);
    const Eigen::VectorXd fg = domain_term(cell, at_c);
    auto llt = moment_solver(cell);

    SmoothedBasis sb;
    sb.dim = dim;
    for (int j = 0; j < dim; ++j) {
        Eigen::MatrixXd& F = Fb[j];
        F.col(1 + j) -= fg;
        Eigen::MatrixXd d(n, dim + 1);
        d.col(0) = F.col(0) / cell.measure;
        d.rightCols(dim) = llt.solve(F.rightCols(dim).transpose()).transpose();
        sb.d[j] = std::move(d);
    }
    return sb;
}

ModifiedB modified_b(const SmoothedBasis& sb)
{
    ModifiedB mb;
    place_block(mb.B, &mb.dB, sb, 0);
    return mb;
}

ElementStiffness element_stiffness(const ElementGeometry& elem, const WachspressBasis& basis,
                                   const Material& mat, Scheme scheme,
                                   const SmoothingOptions& opts)
{
    check_scheme(elem, mat, scheme);
    const int dim = elem.dim;
    const int ndof = scatter_dofs(elem);
    ElementStiffness out;
    out.K = Eigen::MatrixXd::Zero(ndof, ndof);

    for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
        if (scheme == Scheme::LS1) {
            const SmoothedBasis sb = smoothed_basis(cell, basis, opts);
            const ModifiedB mb = modified_b(sb);
            accumulate_ls1(cell, mb, mat.C, out.K);
            out.interior_points += 1;
        } else if (scheme == Scheme::LS3n) {
            auto Fb = boundary_moments(cell, basis, opts);
            const QuadRule pts = interior_rule(cell);
            const int m = static_cast<int>(pts.size());

            Eigen::MatrixXd M(dim + 1, m);
            Eigen::VectorXd interior_phi_sum = Eigen::VectorXd::Zero(basis.size());
            std::vector<Eigen::VectorXd> phi_at(m);
            for (int g = 0; g < m; ++g) {
                M(0, g) = pts[g].w;
                const Vec3 q_local = pts[g].x - cell.centroid;
                for (int k = 0; k < dim; ++k) M(1 + k, g) = pts[g].w * q_local[k];
                basis.values(pts[g].x, phi_at[g]);
                interior_phi_sum += pts[g].w * phi_at[g];
                out.interior_points += 1;
            }
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

            std::array<Eigen::MatrixXd, 3> Y;
            for (int j = 0; j < dim; ++j) {
                Fb[j].col(1 + j) -= interior_phi_sum;
                Y[j] = lu.solve(Fb[j].transpose()).transpose(); // n x m, values at pts
            }
            for (int g = 0; g < m; ++g) {
                SmoothedBasis sg;
                sg.dim = dim;
                for (int j = 0; j < dim; ++j) sg.d[j] = Y[j].col(g);
                Eigen::MatrixXd B;
                place_block(B, nullptr, sg, 0);
                out.K.noalias() += pts[g].w * B.transpose() * mat.C * B;
            }
        } else { // CS
            auto Fb = boundary_moments(cell, basis, opts);
            SmoothedBasis sc;
            sc.dim = dim;
            for (int j = 0; j < dim; ++j) sc.d[j] = Fb[j].col(0) / cell.measure;
            Eigen::MatrixXd B;
            place_block(B, nullptr, sc, 0);
            out.K.noalias() += cell.measure * B.transpose() * mat.C * B;
        }
    }
    return out;
}

Eigen::VectorXd body_force_vector(const ElementGeometry& elem, const WachspressBasis& basis,
                                  const BodyForce& b, Scheme scheme, const SmoothingOptions& opts)
{
    (void)opts;
    const int dim = elem.dim;
    const int n = elem.n_vertices();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim * n);

    for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
        if (scheme == Scheme::LS1) {
            const BasisEval at_c = basis.eval(cell.centroid);
            const Vec3 bc = b(cell.centroid);
            for (int I = 0; I < n; ++I) {
                const double coeff =
                    cell.measure * at_c.values[I] +
                    0.5 * contract_hessian(at_c.hessians, I, cell.second_moments);
                for (int c = 0; c < dim; ++c) f[dim * I + c] += coeff * bc[c];
            }
        } else if (scheme == Scheme::LS3n) {
            Eigen::VectorXd phi;
            for (const QuadPoint& qp : interior_rule(cell)) {
                basis.values(qp.x, phi);
                const Vec3 bg = b(qp.x);
                for (int I = 0; I < n; ++I)
                    for (int c = 0; c < dim; ++c) f[dim * I + c] += qp.w * phi[I] * bg[c];
            }
        } else { // CS: single centroid point per subcell
            Eigen::VectorXd phi;
            basis.values(cell.centroid, phi);
            const Vec3 bc = b(cell.centroid);
            for (int I = 0; I < n; ++I)
                for (int c = 0; c < dim; ++c) f[dim * I + c] += cell.measure * phi[I] * bc[c];
        }
    }
    return f;
}

IntegrationResult integrate_function(const ElementGeometry& elem, const ScalarField& f,
                                     const HessianField& hess, double fd_step_rel)
{
    const int dim = elem.dim;
    const double h = fd_step_rel * elem.diameter();

    auto fd_hessian = [&](const Vec3& x) {
        Mat3 H = Mat3::Zero();
        for (int i = 0; i < dim; ++i) {
            Vec3 ei = Vec3::Zero();
            ei[i] = h;
            H(i, i) = (f(x + ei) - 2.0 * f(x) + f(x - ei)) / (h * h);
            for (int j = i + 1; j < dim; ++j) {
                Vec3 ej = Vec3::Zero();
                ej[j] = h;
                H(i, j) = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                          (4.0 * h * h);
                H(j, i) = H(i, j);
            }
        }
        return H;
    };

    IntegrationResult out;
    for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
        const Mat3 H = hess ? hess(cell.centroid) : fd_hessian(cell.centroid);
        const Mat3& I = cell.second_moments;
        double tr = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tr += H(i, j) * I(i, j);
        out.value += cell.measure * f(cell.centroid) + 0.5 * tr;
        out.interior_points += 1;
    }
    return out;
}

} // namespace polyls
