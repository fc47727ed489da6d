#include "polyls/material.hpp"

#include <stdexcept>

namespace polyls {

namespace {

void check(double E, double nu)
{
    if (E <= 0.0) throw std::invalid_argument("material: Young's modulus must be positive");
    if (nu <= -1.0 || nu >= 0.5)
        throw std::invalid_argument("material: Poisson ratio must lie in (-1, 0.5)");
}

} // namespace

Material Material::plane_stress(double E, double nu)
{
    check(E, nu);
    Material m{E, nu, Model::PlaneStress, Eigen::MatrixXd::Zero(3, 3)};
    const double s = E / (1.0 - nu * nu);
    m.C << s, s * nu, 0.0,
           s * nu, s, 0.0,
           0.0, 0.0, s * (1.0 - nu) / 2.0;
    return m;
}

Material Material::plane_strain(double E, double nu)
{
    check(E, nu);
    Material m{E, nu, Model::PlaneStrain, Eigen::MatrixXd::Zero(3, 3)};
    const double s = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    m.C << s * (1.0 - nu), s * nu, 0.0,
           s * nu, s * (1.0 - nu), 0.0,
           0.0, 0.0, s * (1.0 - 2.0 * nu) / 2.0;
    return m;
}

Material Material::isotropic_3d(double E, double nu)
{
    check(E, nu);
    Material m{E, nu, Model::Isotropic3D, Eigen::MatrixXd::Zero(6, 6)};
    const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double G = E / (2.0 * (1.0 + nu));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m.C(i, j) = lambda;
        m.C(i, i) = lambda + 2.0 * G;
        m.C(3 + i, 3 + i) = G;
    }
    return m;
}

} // namespace polyls
