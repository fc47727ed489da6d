#pragma once

#include <Eigen/Dense>

namespace polyls {

// Isotropic linear elastic material with its constitutive matrix in Voigt
// form. Voigt order: (xx, yy, xy) in 2D and (xx, yy, zz, xy, yz, zx) in 3D,
// with engineering shear strains.
struct Material {
    enum class Model { PlaneStress, PlaneStrain, Isotropic3D };

    double E = 1.0;
    double nu = 0.3;
    Model model = Model::PlaneStress;
    Eigen::MatrixXd C;

    int dim() const { return model == Model::Isotropic3D ? 3 : 2; }
    int voigt() const { return model == Model::Isotropic3D ? 6 : 3; }

    static Material plane_stress(double E, double nu);
    static Material plane_strain(double E, double nu);
    static Material isotropic_3d(double E, double nu);
};

} // namespace polyls
