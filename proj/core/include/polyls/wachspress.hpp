#pragma once

#include "polyls/mesh.hpp"

#include <Eigen/Dense>

namespace polyls {

// Hessian component order used throughout: xx, yy, zz, xy, yz, xz.
enum HessComp { HXX = 0, HYY = 1, HZZ = 2, HXY = 3, HYZ = 4, HXZ = 5 };

struct BasisEval {
    Eigen::VectorXd values;    // per node
    Eigen::MatrixXd gradients; // n x 3, z column zero in 2D
    Eigen::MatrixXd hessians;  // n x 6 in the HessComp order

    Mat3 hessian(int node) const
    {
        Mat3 h;
        h << hessians(node, HXX), hessians(node, HXY), hessians(node, HXZ),
             hessians(node, HXY), hessians(node, HYY), hessians(node, HYZ),
             hessians(node, HXZ), hessians(node, HYZ), hessians(node, HZZ);
        return h;
    }
};

// Wachspress coordinates on a convex polytope, with analytic first and second
// derivatives. Weights are evaluated in product form, w_v = c_v * prod of the
// plane distances of the non-incident facets, which stays finite on the whole
// closed element; values() is therefore usable at boundary quadrature points.
class WachspressBasis {
public:
    explicit WachspressBasis(const ElementGeometry& elem);

    int size() const { return static_cast<int>(verts_.size()); }
    int dim() const { return dim_; }
    double diameter() const { return diam_; }
    bool convex() const { return convex_; }

    // Basis values on the closed element; throws if x lies outside.
    void values(const Vec3& x, Eigen::VectorXd& out) const;
    Eigen::VectorXd values(const Vec3& x) const;

    // Values, gradients and Hessians at a strictly interior point
    // (all facet distances > 1e-12 * diameter); throws otherwise.
    void eval(const Vec3& x, BasisEval& out) const;
    BasisEval eval(const Vec3& x) const;

private:
    struct Facet {
        Vec3 n = Vec3::Zero(); // unit outward normal
        double offset = 0.0;   // h(x) = offset - n.x
    };

    void build_2d(const ElementGeometry& elem);
    void build_3d(const ElementGeometry& elem);
    void facet_distances(const Vec3& x, Eigen::ArrayXd& g) const;

    int dim_ = 2;
    int element_index_ = -1;
    double diam_ = 0.0;
    bool convex_ = true;
    std::vector<Vec3> verts_;
    std::vector<Facet> facets_;
    std::vector<std::array<int, 3>> incident_; // facets incident to each vertex
    std::vector<double> corner_det_;           // c_v
};

} // namespace polyls
