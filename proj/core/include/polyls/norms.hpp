#pragma once

#include "polyls/assembly.hpp"
#include "polyls/mesh.hpp"

#include <functional>

namespace polyls {

// (i,j) entry = du_i/dx_j.
using GradientField = std::function<Mat3(const Vec3&)>;

struct ErrorNorms {
    double l2 = 0.0;      // relative unless `absolute` is set
    double h1 = 0.0;      // H1 seminorm, relative unless `absolute` is set
    bool absolute = false;
};

// Relative L2 and H1-seminorm errors of a discrete field against an exact
// solution. The quadrature is a degree-4 rule on the simplex subdivision,
// independent of the assembly scheme. When the exact-field norm vanishes the
// absolute norms are returned with the flag set.
ErrorNorms error_norms(const PolytopeMesh& mesh, const DisplacementField& field,
                       const VectorField& exact_u, const GradientField& exact_grad);

} // namespace polyls
