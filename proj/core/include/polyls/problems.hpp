#pragma once

#include "polyls/assembly.hpp"
#include "polyls/convergence.hpp"
#include "polyls/norms.hpp"
#include "polyls/voronoi.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace polyls {

// Manufactured polynomial displacement field u_i = a_i + B_ij x_j + x^T Q_i x.
struct PolyField {
    int dim = 2;
    Vec3 a = Vec3::Zero();
    Mat3 B = Mat3::Zero();
    std::array<Mat3, 3> Q = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

    Vec3 displacement(const Vec3& x) const;
    Mat3 gradient(const Vec3& x) const; // (i,j) = du_i/dx_j
    Mat3 stress(const Vec3& x, const Material& mat) const;
    Vec3 body_force(const Material& mat) const; // constant: -div(stress)
};

PolyField linear_patch_field(int dim);
PolyField quadratic_patch_field(int dim);

// Cantilever under an end shear load, plane stress; the classical closed-form
// displacement and stress fields.
struct CantileverProblem {
    double L = 10.0;
    double D = 2.0;
    double E = 3e7;
    double nu = 0.25;
    double P = 150.0;

    double inertia() const { return D * D * D / 12.0; }
    Material material() const { return Material::plane_stress(E, nu); }
    Vec3 displacement(const Vec3& x) const;
    Mat3 gradient(const Vec3& x) const;
    Mat3 stress(const Vec3& x) const;
    double tip_deflection() const; // v at (L, 0)
};

// Torsion of a prismatic bar with rectangular cross-section [-a,a] x [-b,b]:
// warping series truncated at N terms, evaluated in overflow-safe form.
struct TorsionSolution {
    double beta = 1.0;
    double a = 1.0;
    double b = 1.0;
    double G = 1.0 / 2.6;
    double L = 5.0;
    int N = 40;

    Vec3 displacement(const Vec3& x) const;
    Mat3 gradient(const Vec3& x) const;
    Mat3 stress(const Vec3& x) const;
    // magnitude ratio of the last to the first series coefficient
    double term_ratio() const;
};

// Quarter model of a square block with a through hole under biaxial tension:
// an L-shaped prism of outer footprint (2a)^2 with an a^2 notch, arm end
// faces pulled by the normal traction t, normal displacement fixed on the two
// symmetry planes and on the bottom face.
struct LShapeProblem {
    double a = 50.0;
    double thickness = 100.0;
    double E = 1.0;
    double nu = 0.3;
    double t = 1.0;
    double reference_energy = 382505.0;

    Domain domain() const;
    Material material() const { return Material::isotropic_3d(E, nu); }
};

struct BenchOptions {
    std::vector<Scheme> schemes = {Scheme::LS1};
    std::vector<int> sizes; // target element counts per refinement level
    std::uint64_t rng_seed = 1;
    int lloyd = 30;
    std::string vtk_path; // when set, the finest-level displacement is exported
};

// One manufactured-field solve: full Dirichlet boundary, the field's constant
// body force, error norms against the exact field.
RunRecord solve_patch_level(const PolytopeMesh& mesh, const Material& mat, Scheme scheme,
                            const PolyField& field, const std::string& name, int level,
                            const std::string& vtk_path = {});

std::vector<RunRecord> run_linear_patch(int dim, const BenchOptions& opt);
std::vector<RunRecord> run_quadratic_patch(int dim, const BenchOptions& opt);
std::vector<RunRecord> run_cantilever(const BenchOptions& opt,
                                      double* finest_tip_deflection = nullptr);
std::vector<RunRecord> run_torsion(const BenchOptions& opt);
std::vector<RunRecord> run_lshape(const BenchOptions& opt);

struct IntegrationRow {
    std::string shape;
    std::string function;
    double ls1 = 0.0;
    double oracle = 0.0;
    double rel_err = 0.0;
    long points_ls1 = 0;
    long points_oracle = 0;
};

// Polynomial integration over the built-in pentagon/hexagon/heptagon and
// hexahedron, against a degree-4 sub-simplex Gauss oracle.
std::vector<IntegrationRow> run_integration_demo();

// Built-in demo shapes (star-convex, artifact-chosen coordinates).
ElementGeometry demo_pentagon();
ElementGeometry demo_hexagon();
ElementGeometry demo_heptagon();
ElementGeometry demo_hexahedron();

// Evaluate a discrete field at a point (element located by containment).
Vec3 evaluate_field(const PolytopeMesh& mesh, const DisplacementField& u, const Vec3& x);

} // namespace polyls
