#include "polyls/problems.hpp"

#include "polyls/quadrature.hpp"
#include "polyls/vtk.hpp"
#include "polyls/wachspress.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyls {

namespace {

Eigen::VectorXd strain_voigt(const Mat3& g, int dim)
{
    Eigen::VectorXd e(dim == 2 ? 3 : 6);
    if (dim == 2) {
        e << g(0, 0), g(1, 1), g(0, 1) + g(1, 0);
    } else {
        e << g(0, 0), g(1, 1), g(2, 2), g(0, 1) + g(1, 0), g(1, 2) + g(2, 1), g(0, 2) + g(2, 0);
    }
    return e;
}

Mat3 stress_from_gradient(const Mat3& g, const Material& mat)
{
    const Eigen::VectorXd s = mat.C * strain_voigt(g, mat.dim());
    Mat3 sig = Mat3::Zero();
    if (mat.dim() == 2) {
        sig(0, 0) = s[0];
        sig(1, 1) = s[1];
        sig(0, 1) = sig(1, 0) = s[2];
    } else {
        sig(0, 0) = s[0];
        sig(1, 1) = s[1];
        sig(2, 2) = s[2];
        sig(0, 1) = sig(1, 0) = s[3];
        sig(1, 2) = sig(2, 1) = s[4];
        sig(0, 2) = sig(2, 0) = s[5];
    }
    return sig;
}

Vec3 tag_normal(const std::string& tag)
{
    if (tag == "xmin") return {-1, 0, 0};
    if (tag == "xmax") return {1, 0, 0};
    if (tag == "ymin") return {0, -1, 0};
    if (tag == "ymax") return {0, 1, 0};
    if (tag == "zmin") return {0, 0, -1};
    if (tag == "zmax") return {0, 0, 1};
    if (tag == "notch_x") return {1, 0, 0};
    if (tag == "notch_y") return {0, 1, 0};
    if (tag == "notch_z") return {0, 0, 1};
    throw std::invalid_argument("unknown boundary tag '" + tag + "'");
}

double mesh_h(const Domain& dom, int n_elements)
{
    return std::pow(dom.measure() / n_elements, 1.0 / dom.dim);
}

// stable sinh(u)/cosh(v) and cosh(u)/cosh(v) for |u| <= v
double ratio_sinh_cosh(double u, double v)
{
    return (std::exp(u - v) - std::exp(-u - v)) / (1.0 + std::exp(-2.0 * v));
}

double ratio_cosh_cosh(double u, double v)
{
    return (std::exp(u - v) + std::exp(-u - v)) / (1.0 + std::exp(-2.0 * v));
}

ElementGeometry radial_polygon(const std::vector<double>& angles_deg,
                               const std::vector<double>& radii, const Vec3& center)
{
    std::vector<Vec3> verts;
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
        const double a = angles_deg[i] * std::numbers::pi / 180.0;
        verts.push_back(center + radii[i] * Vec3(std::cos(a), std::sin(a), 0.0));
    }
    return make_polygon(std::move(verts));
}

} // namespace

Vec3 PolyField::displacement(const Vec3& x) const
{
    Vec3 u = a + B * x;
    for (int i = 0; i < dim; ++i) u[i] += x.dot(Q[i] * x);
    return u;
}

Mat3 PolyField::gradient(const Vec3& x) const
{
    Mat3 g = B;
    for (int i = 0; i < dim; ++i) g.row(i) += 2.0 * (Q[i] * x).transpose();
    return g;
}

Mat3 PolyField::stress(const Vec3& x, const Material& mat) const
{
    return stress_from_gradient(gradient(x), mat);
}

Vec3 PolyField::body_force(const Material& mat) const
{
    // stress is affine in x, so unit coordinate steps recover its divergence
    Vec3 b = Vec3::Zero();
    const Mat3 s0 = stress(Vec3::Zero(), mat);
    for (int j = 0; j < dim; ++j) {
        Vec3 ej = Vec3::Zero();
        ej[j] = 1.0;
        b -= (stress(ej, mat) - s0).col(j);
    }
    return b;
}

PolyField linear_patch_field(int dim)
{
    PolyField f;
    f.dim = dim;
    if (dim == 2) {
        f.a = Vec3(0.1, 0.05, 0.0);
        f.B << 0.1, 0.2, 0.0,
               0.15, 0.1, 0.0,
               0.0, 0.0, 0.0;
    } else {
        f.a = Vec3(0.1, 0.05, 0.05);
        f.B << 0.1, 0.2, 0.2,
               0.15, 0.1, 0.2,
               0.1, 0.2, 0.2;
    }
    return f;
}

PolyField quadratic_patch_field(int dim)
{
    PolyField f;
    f.dim = dim;
    if (dim == 2) {
        f.Q[0] << 0.1, 0.05, 0.0,
                  0.05, 0.2, 0.0,
                  0.0, 0.0, 0.0;
        f.Q[1] << 0.05, 0.075, 0.0,
                  0.075, 0.1, 0.0,
                  0.0, 0.0, 0.0;
    } else {
        f.a = Vec3(0.1, 0.15, 0.15);
        f.B << 0.4, 0.0, 0.1,
               0.1, 0.1, 0.2,
               0.15, 0.2, 0.1;
        f.Q[0] << 0.15, 0.075, 0.05,
                  0.075, 0.2, 0.05,
                  0.05, 0.05, 0.1;
        f.Q[1] << 0.2, 0.1, 0.1,
                  0.1, 0.15, 0.05,
                  0.1, 0.05, 0.1;
        f.Q[2] << 0.15, 0.05, 0.075,
                  0.05, 0.1, 0.1,
                  0.075, 0.1, 0.2;
    }
    return f;
}

Vec3 CantileverProblem::displacement(const Vec3& p) const
{
    const double x = p.x(), y = p.y();
    const double I = inertia();
    const double u = P * y / (6.0 * E * I) *
                     ((6.0 * L - 3.0 * x) * x + (2.0 + nu) * (y * y - D * D / 4.0));
    const double v = -P / (6.0 * E * I) *
                     (3.0 * nu * y * y * (L - x) + (4.0 + 5.0 * nu) * D * D * x / 4.0 +
                      (3.0 * L - x) * x * x);
    return {u, v, 0.0};
}

Mat3 CantileverProblem::gradient(const Vec3& p) const
{
    const double x = p.x(), y = p.y();
    const double I = inertia();
    Mat3 g = Mat3::Zero();
    g(0, 0) = P * y * (L - x) / (E * I);
    g(0, 1) = P / (6.0 * E * I) * ((6.0 * L - 3.0 * x) * x + (2.0 + nu) * (3.0 * y * y - D * D / 4.0));
    g(1, 0) = -P / (6.0 * E * I) *
              (-3.0 * nu * y * y + (4.0 + 5.0 * nu) * D * D / 4.0 + 6.0 * L * x - 3.0 * x * x);
    g(1, 1) = -nu * P * y * (L - x) / (E * I);
    return g;
}

Mat3 CantileverProblem::stress(const Vec3& p) const
{
    const double x = p.x(), y = p.y();
    const double I = inertia();
    Mat3 s = Mat3::Zero();
    s(0, 0) = P * (L - x) * y / I;
    s(0, 1) = s(1, 0) = P * (y * y - D * D / 4.0) / (2.0 * I);
    return s;
}

double CantileverProblem::tip_deflection() const
{
    return displacement(Vec3(L, 0.0, 0.0)).y();
}

Vec3 TorsionSolution::displacement(const Vec3& p) const
{
    const double x = p.x(), y = p.y(), z = p.z();
    const double pi = std::numbers::pi;
    double warp = x * y;
    for (int n = 1; n <= N; ++n) {
        const double k = (2.0 * n - 1.0) * pi / (2.0 * a);
        const double c = 32.0 * a * a * ((n % 2 == 0) ? 1.0 : -1.0) /
                         (pi * pi * pi * std::pow(2.0 * n - 1.0, 3));
        warp += c * std::sin(k * x) * ratio_sinh_cosh(k * y, k * b);
    }
    return {-beta * y * z, beta * x * z, beta * warp};
}

Mat3 TorsionSolution::gradient(const Vec3& p) const
{
    const double x = p.x(), y = p.y(), z = p.z();
    const double pi = std::numbers::pi;
    double wx = y, wy = x;
    for (int n = 1; n <= N; ++n) {
        const double k = (2.0 * n - 1.0) * pi / (2.0 * a);
        const double c = 32.0 * a * a * ((n % 2 == 0) ? 1.0 : -1.0) /
                         (pi * pi * pi * std::pow(2.0 * n - 1.0, 3));
        wx += c * k * std::cos(k * x) * ratio_sinh_cosh(k * y, k * b);
        wy += c * k * std::sin(k * x) * ratio_cosh_cosh(k * y, k * b);
    }
    Mat3 g = Mat3::Zero();
    g.row(0) = Vec3(0.0, -beta * z, -beta * y).transpose();
    g.row(1) = Vec3(beta * z, 0.0, beta * x).transpose();
    g.row(2) = Vec3(beta * wx, beta * wy, 0.0).transpose();
    return g;
}

Mat3 TorsionSolution::stress(const Vec3& p) const
{
    const Mat3 g = gradient(p);
    Mat3 s = Mat3::Zero();
    s(0, 2) = s(2, 0) = G * (g(0, 2) + g(2, 0));
    s(1, 2) = s(2, 1) = G * (g(1, 2) + g(2, 1));
    return s;
}

double TorsionSolution::term_ratio() const
{
    return 1.0 / std::pow(2.0 * N - 1.0, 3);
}

Domain LShapeProblem::domain() const
{
    return Domain::lshape_prism(Vec3(0, 0, 0), Vec3(2.0 * a, 2.0 * a, thickness));
}

RunRecord solve_patch_level(const PolytopeMesh& mesh, const Material& mat, Scheme scheme,
                            const PolyField& field, const std::string& name, int level,
                            const std::string& vtk_path)
{
    BoundaryCondition bc;
    dirichlet_on_tags(mesh, {}, [&](const Vec3& x) { return field.displacement(x); }, bc);

    const Vec3 b = field.body_force(mat);
    BodyForce bf = nullptr;
    if (b.norm() > 0.0) bf = [b](const Vec3&) { return b; };

    const GlobalSystem sys = assemble(mesh, mat, scheme, bf, bc);
    const DisplacementField u = solve(sys, bc);
    if (!vtk_path.empty()) write_vtk(mesh, vtk_path, &u);
    const ErrorNorms norms = error_norms(
        mesh, u, [&](const Vec3& x) { return field.displacement(x); },
        [&](const Vec3& x) { return field.gradient(x); });

    RunRecord r;
    r.benchmark = name;
    r.scheme = scheme_name(scheme);
    r.level = level;
    r.n_elements = mesh.n_elements();
    r.n_dofs = mesh.dim * mesh.n_nodes();
    r.l2 = norms.l2;
    r.h1 = norms.h1;
    r.energy = strain_energy(u, sys);
    r.interior_points = sys.interior_points;
    r.stiffness_seconds = sys.stiffness_seconds;
    return r;
}

namespace {

std::vector<RunRecord> run_patch(int dim, const PolyField& field, const std::string& name,
                                 const BenchOptions& opt)
{
    const Domain dom = dim == 2 ? Domain::box_2d(Vec3(0, 0, 0), Vec3(1, 1, 0))
                                : Domain::box_3d(Vec3(0, 0, 0), Vec3(1, 1, 1));
    const Material mat =
        dim == 2 ? Material::plane_stress(1.0, 0.3) : Material::isotropic_3d(1.0, 0.3);

    std::vector<RunRecord> out;
    for (std::size_t level = 0; level < opt.sizes.size(); ++level) {
        const PolytopeMesh mesh =
            generate_cvt_mesh(dom, opt.sizes[level], opt.lloyd, opt.rng_seed + level);
        for (Scheme scheme : opt.schemes) {
            const bool last = level + 1 == opt.sizes.size() && scheme == opt.schemes.back();
            RunRecord r = solve_patch_level(mesh, mat, scheme, field, name,
                                            static_cast<int>(level),
                                            last ? opt.vtk_path : std::string{});
            r.h = mesh_h(dom, mesh.n_elements());
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace

std::vector<RunRecord> run_linear_patch(int dim, const BenchOptions& opt)
{
    return run_patch(dim, linear_patch_field(dim), dim == 2 ? "linear_patch_2d" : "linear_patch_3d",
                     opt);
}

std::vector<RunRecord> run_quadratic_patch(int dim, const BenchOptions& opt)
{
    return run_patch(dim, quadratic_patch_field(dim),
                     dim == 2 ? "quadratic_patch_2d" : "quadratic_patch_3d", opt);
}

std::vector<RunRecord> run_cantilever(const BenchOptions& opt, double* finest_tip_deflection)
{
    const CantileverProblem prob;
    const Domain dom = Domain::box_2d(Vec3(0.0, -prob.D / 2.0, 0.0), Vec3(prob.L, prob.D / 2.0, 0.0));
    const Material mat = prob.material();

    std::vector<RunRecord> out;
    for (std::size_t level = 0; level < opt.sizes.size(); ++level) {
        const PolytopeMesh mesh =
            generate_cvt_mesh(dom, opt.sizes[level], opt.lloyd, opt.rng_seed + level);
        BoundaryCondition bc;
        dirichlet_on_tags(mesh, {"xmin"}, [&](const Vec3& x) { return prob.displacement(x); }, bc);
        traction_on_tags(mesh, {"xmax"},
                         [&](const Vec3& x) { return Vec3(prob.stress(x) * Vec3(1, 0, 0)); }, bc);

        for (Scheme scheme : opt.schemes) {
            const GlobalSystem sys = assemble(mesh, mat, scheme, nullptr, bc);
            const DisplacementField u = solve(sys, bc);
            if (!opt.vtk_path.empty() && level + 1 == opt.sizes.size() &&
                scheme == opt.schemes.back())
                write_vtk(mesh, opt.vtk_path, &u);
            const ErrorNorms norms = error_norms(
                mesh, u, [&](const Vec3& x) { return prob.displacement(x); },
                [&](const Vec3& x) { return prob.gradient(x); });

            RunRecord r;
            r.benchmark = "cantilever_2d";
            r.scheme = scheme_name(scheme);
            r.level = static_cast<int>(level);
            r.n_elements = mesh.n_elements();
            r.n_dofs = mesh.dim * mesh.n_nodes();
            r.h = mesh_h(dom, mesh.n_elements());
            r.l2 = norms.l2;
            r.h1 = norms.h1;
            r.energy = strain_energy(u, sys);
            r.interior_points = sys.interior_points;
            r.stiffness_seconds = sys.stiffness_seconds;
            out.push_back(std::move(r));

            if (finest_tip_deflection && level + 1 == opt.sizes.size() &&
                scheme == opt.schemes.back())
                *finest_tip_deflection = evaluate_field(mesh, u, Vec3(prob.L, 0.0, 0.0)).y();
        }
    }
    return out;
}

std::vector<RunRecord> run_torsion(const BenchOptions& opt)
{
    TorsionSolution sol;
    sol.G = 1.0 / (2.0 * (1.0 + 0.3));
    const Domain dom = Domain::box_3d(Vec3(-sol.a, -sol.b, 0.0), Vec3(sol.a, sol.b, sol.L));
    const Material mat = Material::isotropic_3d(1.0, 0.3);

    std::vector<RunRecord> out;
    for (std::size_t level = 0; level < opt.sizes.size(); ++level) {
        const PolytopeMesh mesh =
            generate_cvt_mesh(dom, opt.sizes[level], opt.lloyd, opt.rng_seed + level);
        BoundaryCondition bc;
        dirichlet_on_tags(mesh, {"zmin", "zmax"},
                          [&](const Vec3& x) { return sol.displacement(x); }, bc);
        for (const char* tag : {"xmin", "xmax", "ymin", "ymax"}) {
            const Vec3 n = tag_normal(tag);
            traction_on_tags(mesh, {tag}, [&sol, n](const Vec3& x) { return Vec3(sol.stress(x) * n); },
                             bc);
        }

        for (Scheme scheme : opt.schemes) {
            const GlobalSystem sys = assemble(mesh, mat, scheme, nullptr, bc);
            const DisplacementField u = solve(sys, bc);
            if (!opt.vtk_path.empty() && level + 1 == opt.sizes.size() &&
                scheme == opt.schemes.back())
                write_vtk(mesh, opt.vtk_path, &u);
            const ErrorNorms norms = error_norms(
                mesh, u, [&](const Vec3& x) { return sol.displacement(x); },
                [&](const Vec3& x) { return sol.gradient(x); });

            RunRecord r;
            r.benchmark = "torsion_3d";
            r.scheme = scheme_name(scheme);
            r.level = static_cast<int>(level);
            r.n_elements = mesh.n_elements();
            r.n_dofs = mesh.dim * mesh.n_nodes();
            r.h = mesh_h(dom, mesh.n_elements());
            r.l2 = norms.l2;
            r.h1 = norms.h1;
            r.energy = strain_energy(u, sys);
            r.interior_points = sys.interior_points;
            r.stiffness_seconds = sys.stiffness_seconds;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<RunRecord> run_lshape(const BenchOptions& opt)
{
    const LShapeProblem prob;
    const Domain dom = prob.domain();
    const Material mat = prob.material();

    std::vector<RunRecord> out;
    for (std::size_t level = 0; level < opt.sizes.size(); ++level) {
        const PolytopeMesh mesh =
            generate_cvt_mesh(dom, opt.sizes[level], opt.lloyd, opt.rng_seed + level);
        BoundaryCondition bc;
        const auto zero = [](const Vec3&) { return Vec3::Zero(); };
        dirichlet_on_tags(mesh, {"xmin"}, zero, bc, {true, false, false});
        dirichlet_on_tags(mesh, {"ymin"}, zero, bc, {false, true, false});
        dirichlet_on_tags(mesh, {"zmin"}, zero, bc, {false, false, true});
        const double t = prob.t;
        traction_on_tags(mesh, {"xmax"}, [t](const Vec3&) { return Vec3(t, 0, 0); }, bc);
        traction_on_tags(mesh, {"ymax"}, [t](const Vec3&) { return Vec3(0, t, 0); }, bc);

        for (Scheme scheme : opt.schemes) {
            const GlobalSystem sys = assemble(mesh, mat, scheme, nullptr, bc);
            const DisplacementField u = solve(sys, bc);
            if (!opt.vtk_path.empty() && level + 1 == opt.sizes.size() &&
                scheme == opt.schemes.back())
                write_vtk(mesh, opt.vtk_path, &u);

            RunRecord r;
            r.benchmark = "lshape_3d";
            r.scheme = scheme_name(scheme);
            r.level = static_cast<int>(level);
            r.n_elements = mesh.n_elements();
            r.n_dofs = mesh.dim * mesh.n_nodes();
            r.h = mesh_h(dom, mesh.n_elements());
            r.energy = strain_energy(u, sys);
            r.interior_points = sys.interior_points;
            r.stiffness_seconds = sys.stiffness_seconds;
            out.push_back(std::move(r));
        }
    }
    return out;
}

ElementGeometry demo_pentagon()
{
    return radial_polygon({10, 80, 150, 222, 295}, {1.1, 0.95, 1.25, 1.0, 1.15},
                          Vec3(0.25, -0.1, 0.0));
}

ElementGeometry demo_hexagon()
{
    return radial_polygon({5, 62, 125, 185, 240, 300}, {0.9, 1.1, 1.0, 1.2, 0.95, 1.05},
                          Vec3(0, 0, 0));
}

ElementGeometry demo_heptagon()
{
    return radial_polygon({0, 48, 106, 160, 205, 260, 310},
                          {1.2, 0.95, 1.1, 1.0, 1.25, 0.9, 1.05}, Vec3(-0.15, 0.2, 0.0));
}

ElementGeometry demo_hexahedron()
{
    std::vector<Vec3> v = {{0, 0, 0},       {2, 0, 0},       {2, 2, 0},       {0, 2, 0},
                           {0.5, 0.5, 1.5}, {1.5, 0.5, 1.5}, {1.5, 1.5, 1.5}, {0.5, 1.5, 1.5}};
    std::vector<std::vector<int>> faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                           {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    return make_polyhedron(std::move(v), std::move(faces));
}

std::vector<IntegrationRow> run_integration_demo()
{
    struct Fn {
        std::string name;
        ScalarField f;
        HessianField h;
    };
    const std::vector<Fn> fns2 = {
        {"1", [](const Vec3&) { return 1.0; }, [](const Vec3&) { return Mat3::Zero(); }},
        {"x", [](const Vec3& x) { return x.x(); }, [](const Vec3&) { return Mat3::Zero(); }},
        {"x^2", [](const Vec3& x) { return x.x() * x.x(); },
         [](const Vec3&) {
             Mat3 h = Mat3::Zero();
             h(0, 0) = 2.0;
             return h;
         }},
        {"xy", [](const Vec3& x) { return x.x() * x.y(); },
         [](const Vec3&) {
             Mat3 h = Mat3::Zero();
             h(0, 1) = h(1, 0) = 1.0;
             return h;
         }},
    };
    const Fn fn3 = {"x^2+y^2+xy+z^2",
                    [](const Vec3& x) {
                        return x.x() * x.x() + x.y() * x.y() + x.x() * x.y() + x.z() * x.z();
                    },
                    [](const Vec3&) {
                        Mat3 h;
                        h << 2, 1, 0, 1, 2, 0, 0, 0, 2;
                        return h;
                    }};

    auto oracle = [](const ElementGeometry& elem, const ScalarField& f, long& pts) {
        double sum = 0.0;
        pts = 0;
        for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
            std::span<const Vec3> verts(cell.verts.data(),
                                        static_cast<std::size_t>(cell.dim) + 1);
            for (const QuadPoint& qp : simplex_rule(verts, cell.dim, 4)) {
                sum += qp.w * f(qp.x);
                ++pts;
            }
        }
        return sum;
    };

    std::vector<IntegrationRow> rows;
    const std::vector<std::pair<std::string, ElementGeometry>> shapes2 = {
        {"pentagon", demo_pentagon()}, {"hexagon", demo_hexagon()}, {"heptagon", demo_heptagon()}};
    for (const auto& [name, elem] : shapes2) {
        for (const Fn& fn : fns2) {
            IntegrationRow row;
            row.shape = name;
            row.function = fn.name;
            const IntegrationResult r = integrate_function(elem, fn.f, fn.h);
            row.ls1 = r.value;
            row.points_ls1 = r.interior_points;
            row.oracle = oracle(elem, fn.f, row.points_oracle);
            row.rel_err = std::abs(row.ls1 - row.oracle) / std::max(std::abs(row.oracle), 1e-300);
            rows.push_back(std::move(row));
        }
    }
    {
        const ElementGeometry hex = demo_hexahedron();
        IntegrationRow row;
        row.shape = "hexahedron";
        row.function = fn3.name;
        const IntegrationResult r = integrate_function(hex, fn3.f, fn3.h);
        row.ls1 = r.value;
        row.points_ls1 = r.interior_points;
        row.oracle = oracle(hex, fn3.f, row.points_oracle);
        row.rel_err = std::abs(row.ls1 - row.oracle) / std::max(std::abs(row.oracle), 1e-300);
        rows.push_back(std::move(row));
    }
    return rows;
}

Vec3 evaluate_field(const PolytopeMesh& mesh, const DisplacementField& u, const Vec3& x)
{
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const ElementGeometry elem = extract_element(mesh, e);
        if (!contains_point(elem, x, 1e-9)) continue;
        const WachspressBasis basis(elem);
        const Eigen::VectorXd phi = basis.values(x);
        Vec3 val = Vec3::Zero();
        for (int a = 0; a < elem.n_vertices(); ++a) val += phi[a] * u.at(elem.global[a]);
        return val;
    }
    throw std::runtime_error("evaluate_field: point lies outside the mesh");
}

} // namespace polyls
