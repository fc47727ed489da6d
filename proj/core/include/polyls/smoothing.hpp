#pragma once

#include "polyls/material.hpp"
#include "polyls/mesh.hpp"
#include "polyls/wachspress.hpp"

#include <array>
#include <functional>

namespace polyls {

// CS: constant smoothing per subcell (2D only). LS3n: linear smoothing with
// 3 (2D) / 4 (3D) interior points per subcell. LS1: linear smoothing with a
// single interior point per subcell and Taylor stabilization.
enum class Scheme { CS, LS3n, LS1 };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct SmoothingOptions {
    // Gauss points per subcell edge in 2D; in 3D values > 2 switch the facet
    // rule to a conical rule of that degree. The default matches the scheme
    // definition; raising it is for studies only.
    int boundary_order = 2;
};

// Moment matrix of the divergence-consistency system, rows/columns ordered
// (1, x, y[, z]); entries are global-coordinate moments of the subcell.
Eigen::MatrixXd assemble_W(const SmoothingCell& cell);

// Right-hand side for one node and one smoothing direction: boundary-integral
// rows for q = (1, x, y[, z]) minus the Taylor-expanded domain term in the row
// whose q-component has unit derivative along `direction`.
Eigen::VectorXd assemble_f(const SmoothingCell& cell, const WachspressBasis& basis, int node,
                           int direction, const SmoothingOptions& opts = {});

// Smoothed derivatives at the subcell centroid. For direction j, row I of d[j]
// is the solution vector: the modified first derivative followed by its first
// derivatives.
struct SmoothedBasis {
    int dim = 2;
    std::array<Eigen::MatrixXd, 3> d; // d[j]: n x (dim+1)
};

SmoothedBasis smoothed_basis(const SmoothingCell& cell, const WachspressBasis& basis,
                             const SmoothingOptions& opts = {});

// Strain-displacement blocks built from the smoothed derivatives and their
// spatial derivatives, in the Voigt layout of Material.
struct ModifiedB {
    Eigen::MatrixXd B;
    std::array<Eigen::MatrixXd, 3> dB;
};

ModifiedB modified_b(const SmoothedBasis& sb);

struct ElementStiffness {
    Eigen::MatrixXd K;         // (dim*n) x (dim*n), dofs interleaved per node
    long interior_points = 0;  // interior basis evaluation points touched
};

ElementStiffness element_stiffness(const ElementGeometry& elem, const WachspressBasis& basis,
                                   const Material& mat, Scheme scheme,
                                   const SmoothingOptions& opts = {});

using BodyForce = std::function<Vec3(const Vec3&)>;

Eigen::VectorXd body_force_vector(const ElementGeometry& elem, const WachspressBasis& basis,
                                  const BodyForce& b, Scheme scheme,
                                  const SmoothingOptions& opts = {});

using ScalarField = std::function<double(const Vec3&)>;
using HessianField = std::function<Mat3(const Vec3&)>;

struct IntegrationResult {
    double value = 0.0;
    long interior_points = 0;
};

// One interior point per subcell; exact for polynomials of total degree <= 2.
// Hessians of f are taken from `hess` when given, otherwise by central finite
// differences with step fd_step_rel * diameter (accuracy-limiting).
IntegrationResult integrate_function(const ElementGeometry& elem, const ScalarField& f,
                                     const HessianField& hess = nullptr,
                                     double fd_step_rel = 1e-5);

} // namespace polyls
