#include "polyls/norms.hpp"

#include "polyls/quadrature.hpp"
#include "polyls/wachspress.hpp"

#include <cmath>

namespace polyls {

ErrorNorms error_norms(const PolytopeMesh& mesh, const DisplacementField& field,
                       const VectorField& exact_u, const GradientField& exact_grad)
{
    const int dim = mesh.dim;
    double num_l2 = 0.0, den_l2 = 0.0;
    double num_h1 = 0.0, den_h1 = 0.0;

    BasisEval be;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const ElementGeometry elem = extract_element(mesh, e);
        const WachspressBasis basis(elem);
        const int n = elem.n_vertices();

        for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
            std::span<const Vec3> verts(cell.verts.data(), static_cast<std::size_t>(dim) + 1);
            for (const QuadPoint& qp : simplex_rule(verts, dim, 4)) {
                basis.eval(qp.x, be);
                Vec3 uh = Vec3::Zero();
                Mat3 gh = Mat3::Zero();
                for (int a = 0; a < n; ++a) {
                    const Vec3 ua = field.at(elem.global[a]);
                    uh += be.values[a] * ua;
                    gh += ua * be.gradients.row(a);
                }
                const Vec3 ue = exact_u(qp.x);
                const Mat3 ge = exact_grad(qp.x);
                num_l2 += qp.w * (uh - ue).squaredNorm();
                den_l2 += qp.w * ue.squaredNorm();
                num_h1 += qp.w * (gh - ge).squaredNorm();
                den_h1 += qp.w * ge.squaredNorm();
            }
        }
    }

    ErrorNorms out;
    if (den_l2 <= 1e-300 || den_h1 <= 1e-300) {
        out.absolute = true;
        out.l2 = std::sqrt(num_l2);
        out.h1 = std::sqrt(num_h1);
    } else {
        out.l2 = std::sqrt(num_l2 / den_l2);
        out.h1 = std::sqrt(num_h1 / den_h1);
    }
    return out;
}

} // namespace polyls
