#include "polyls/smoothing.hpp"

#include "polyls/quadrature.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace polyls;

namespace {

ElementGeometry unit_square()
{
    return make_polygon({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
}

ElementGeometry pentagon()
{
    return make_polygon({{0, 0, 0}, {2, 0.2, 0}, {2.4, 1.5, 0}, {1.0, 2.4, 0}, {-0.4, 1.2, 0}});
}

ElementGeometry frustum()
{
    std::vector<Vec3> v = {{0, 0, 0},       {2, 0, 0},       {2, 2, 0},       {0, 2, 0},
                           {0.5, 0.5, 1.5}, {1.5, 0.5, 1.5}, {1.5, 1.5, 1.5}, {0.5, 1.5, 1.5}};
    return make_polyhedron(std::move(v), {{0, 3, 2, 1},
                                          {4, 5, 6, 7},
                                          {0, 1, 5, 4},
                                          {1, 2, 6, 5},
                                          {2, 3, 7, 6},
                                          {3, 0, 4, 7}});
}

// P1 gradients of the barycentric basis on a triangle
Eigen::MatrixXd p1_gradients(const ElementGeometry& tri)
{
    const Vec3 a = tri.verts[0], b = tri.verts[1], c = tri.verts[2];
    const double twoA = cross2(b - a, c - a);
    Eigen::MatrixXd g(3, 2);
    g.row(0) << (b.y() - c.y()) / twoA, (c.x() - b.x()) / twoA;
    g.row(1) << (c.y() - a.y()) / twoA, (a.x() - c.x()) / twoA;
    g.row(2) << (a.y() - b.y()) / twoA, (b.x() - a.x()) / twoA;
    return g;
}

// P1 projection of the compatible smoothed derivatives via dense interior
// quadrature: the oracle behind the boundary-integral route.
Eigen::MatrixXd projected_d(const SmoothingCell& cell, const WachspressBasis& basis, int direction)
{
    const int dim = cell.dim;
    const int n = basis.size();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, dim + 1);
    std::span<const Vec3> verts(cell.verts.data(), static_cast<std::size_t>(dim) + 1);
    BasisEval be;
    for (const QuadPoint& qp : simplex_rule(verts, dim, 10)) {
        basis.eval(qp.x, be);
        const Vec3 q_local = qp.x - cell.centroid;
        for (int I = 0; I < n; ++I) {
            const double gd = be.gradients(I, direction);
            F(I, 0) += qp.w * gd;
            for (int k = 0; k < dim; ++k) F(I, 1 + k) += qp.w * gd * q_local[k];
        }
    }
    Eigen::MatrixXd d(n, dim + 1);
    d.col(0) = F.col(0) / cell.measure;
    const Eigen::MatrixXd Ic = cell.second_moments.topLeftCorner(dim, dim);
    d.rightCols(dim) = Ic.llt().solve(F.rightCols(dim).transpose()).transpose();
    return d;
}

Eigen::VectorXd rigid_modes_col(const ElementGeometry& elem, int mode)
{
    const int dim = elem.dim;
    const int n = elem.n_vertices();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim * n);
    for (int i = 0; i < n; ++i) {
        const Vec3& x = elem.verts[i];
        Vec3 v = Vec3::Zero();
        if (dim == 2) {
            if (mode == 0) v = Vec3(1, 0, 0);
            if (mode == 1) v = Vec3(0, 1, 0);
            if (mode == 2) v = Vec3(-x.y(), x.x(), 0);
        } else {
            if (mode < 3) v[mode] = 1.0;
            if (mode == 3) v = Vec3(0, -x.z(), x.y());
            if (mode == 4) v = Vec3(x.z(), 0, -x.x());
            if (mode == 5) v = Vec3(-x.y(), x.x(), 0);
        }
        for (int c = 0; c < dim; ++c) u[dim * i + c] = v[c];
    }
    return u;
}

Eigen::VectorXd nodal_scalar(const ElementGeometry& elem,
                             const std::function<double(const Vec3&)>& f)
{
    Eigen::VectorXd u(elem.n_vertices());
    for (int i = 0; i < elem.n_vertices(); ++i) u[i] = f(elem.verts[i]);
    return u;
}

} // namespace

TEST_CASE("assemble_W of the standard triangle matches the moment layout")
{
    const std::array<Vec3, 3> tri = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    const SmoothingCell cell = make_smoothing_cell(tri, 2);
    const Eigen::MatrixXd W = assemble_W(cell);
    REQUIRE(W.rows() == 3);

    CHECK(W(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(W(0, 1) == 0.0);
    CHECK(W(0, 2) == 0.0);
    CHECK(W(1, 0) == doctest::Approx(0.5 / 3.0).epsilon(1e-14));
    CHECK(W(1, 1) == doctest::Approx(1.0 / 36.0).epsilon(1e-13));
    CHECK(W(1, 2) == doctest::Approx(-1.0 / 72.0).epsilon(1e-13));
    CHECK(W(2, 0) == doctest::Approx(0.5 / 3.0).epsilon(1e-14));
    CHECK(W(2, 1) == doctest::Approx(-1.0 / 72.0).epsilon(1e-13));
    CHECK(W(2, 2) == doctest::Approx(1.0 / 36.0).epsilon(1e-13));
}

TEST_CASE("W scales as s^d in row 0 and s^(d+2) in the moment block")
{
    std::mt19937_64 rng(4);
    const ElementGeometry poly = testing::random_convex_polygon(rng);
    const auto cells = subdivide_to_simplices(poly);
    const double s = 2.5;

    std::vector<Vec3> scaled(3);
    for (int i = 0; i < 3; ++i) scaled[i] = s * cells[0].verts[i];
    const SmoothingCell big = make_smoothing_cell(scaled, 2);
    const Eigen::MatrixXd W0 = assemble_W(cells[0]);
    const Eigen::MatrixXd W1 = assemble_W(big);
    CHECK(W1(0, 0) == doctest::Approx(s * s * W0(0, 0)).epsilon(1e-12));
    CHECK(W1(1, 1) == doctest::Approx(std::pow(s, 4) * W0(1, 1)).epsilon(1e-12));
    CHECK(W1(2, 2) == doctest::Approx(std::pow(s, 4) * W0(2, 2)).epsilon(1e-12));
    CHECK(W1(1, 2) == doctest::Approx(std::pow(s, 4) * W0(1, 2)).epsilon(1e-12));
}

TEST_CASE("divergence theorem closes the constant-function row")
{
    // sum over nodes of the q=1 row is the closed boundary integral of n_j
    const ElementGeometry pent = pentagon();
    const WachspressBasis basis(pent);
    for (const SmoothingCell& cell : subdivide_to_simplices(pent)) {
        for (int j = 0; j < 2; ++j) {
            double row0 = 0.0;
            for (int I = 0; I < basis.size(); ++I) row0 += assemble_f(cell, basis, I, j)[0];
            CHECK(std::abs(row0) <= 1e-13);
        }
    }
}

TEST_CASE("a triangle element recovers constant P1 derivatives")
{
    const ElementGeometry tri = make_polygon({{0.1, 0.05, 0}, {1.3, 0.2, 0}, {0.4, 1.2, 0}});
    const WachspressBasis basis(tri);
    const Eigen::MatrixXd gp1 = p1_gradients(tri);

    for (const SmoothingCell& cell : subdivide_to_simplices(tri)) {
        const Eigen::MatrixXd W = assemble_W(cell);
        const SmoothedBasis sb = smoothed_basis(cell, basis);
        for (int j = 0; j < 2; ++j) {
            for (int I = 0; I < 3; ++I) {
                // the public global-coordinate system solves to the same d
                const Eigen::VectorXd d = W.partialPivLu().solve(assemble_f(cell, basis, I, j));
                CHECK(d[0] == doctest::Approx(gp1(I, j)).epsilon(1e-10));
                CHECK(std::abs(d[1]) <= 1e-9);
                CHECK(std::abs(d[2]) <= 1e-9);
                CHECK(sb.d[j](I, 0) == doctest::Approx(d[0]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("smoothed derivatives reproduce linear fields exactly")
{
    std::mt19937_64 rng(19);
    std::vector<ElementGeometry> zoo = {unit_square(), pentagon(),
                                        testing::random_convex_polygon(rng, 6), frustum(),
                                        testing::random_hexahedron(rng)};
    for (const auto& elem : zoo) {
        const WachspressBasis basis(elem);
        const int dim = elem.dim;
        const Vec3 bvec(0.7, -1.3, dim == 3 ? 0.4 : 0.0);
        const Eigen::VectorXd u =
            nodal_scalar(elem, [&](const Vec3& x) { return 2.0 + bvec.dot(x); });
        const Eigen::VectorXd uconst = nodal_scalar(elem, [](const Vec3&) { return 3.14; });

        for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
            const SmoothedBasis sb = smoothed_basis(cell, basis);
            for (int j = 0; j < dim; ++j) {
                const double diam = elem.diameter();
                CHECK(std::abs(u.dot(sb.d[j].col(0)) - bvec[j]) <= 1e-10);
                for (int k = 0; k < dim; ++k)
                    CHECK(std::abs(u.dot(sb.d[j].col(1 + k))) <= 1e-8 / diam);
                CHECK(std::abs(uconst.dot(sb.d[j].col(0))) <= 1e-10);
                // derivative of partition of unity
                CHECK(std::abs(sb.d[j].col(0).sum()) <= 1e-10 / diam);
            }
        }
    }
}

TEST_CASE("unit square patch: smoothed x-derivative of u=x is one")
{
    const ElementGeometry sq = unit_square();
    const WachspressBasis basis(sq);
    const Eigen::VectorXd u = nodal_scalar(sq, [](const Vec3& x) { return x.x(); });
    for (const SmoothingCell& cell : subdivide_to_simplices(sq)) {
        const SmoothedBasis sb = smoothed_basis(cell, basis);
        CHECK(u.dot(sb.d[0].col(0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(u.dot(sb.d[1].col(0))) <= 1e-12);
    }
}

TEST_CASE("quadratic data: smoothed derivative tracks the dense projection")
{
    const ElementGeometry pent = pentagon();
    const WachspressBasis basis(pent);
    const Eigen::VectorXd u = nodal_scalar(pent, [](const Vec3& x) { return x.x() * x.x(); });

    for (const SmoothingCell& cell : subdivide_to_simplices(pent)) {
        const SmoothedBasis sb = smoothed_basis(cell, basis);
        const Eigen::MatrixXd dref = projected_d(cell, basis, 0);
        const double val = u.dot(sb.d[0].col(0));
        const double ref = u.dot(dref.col(0));
        // boundary quadrature differences only
        CHECK(std::abs(val - ref) <= 2e-3 * std::abs(ref));
        // and the value sits within O(h) of the exact derivative at the centroid
        const double h = diameter(std::span<const Vec3>(cell.verts.data(), 3));
        CHECK(std::abs(val - 2.0 * cell.centroid.x()) <= 2.0 * h);
    }
}

TEST_CASE("element stiffness is symmetric and annihilates rigid modes")
{
    std::mt19937_64 rng(29);
    std::vector<ElementGeometry> zoo = {pentagon(), testing::random_convex_polygon(rng, 7),
                                        frustum(), testing::random_hexahedron(rng)};
    for (const auto& elem : zoo) {
        const WachspressBasis basis(elem);
        const Material mat = elem.dim == 2 ? Material::plane_stress(200.0, 0.3)
                                           : Material::isotropic_3d(200.0, 0.3);
        for (Scheme scheme : {Scheme::LS1, Scheme::LS3n, Scheme::CS}) {
            if (scheme == Scheme::CS && elem.dim == 3) continue;
            const ElementStiffness es = element_stiffness(elem, basis, mat, scheme);
            const double knorm = es.K.norm();
            CHECK((es.K - es.K.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12 * knorm);
            const int nmodes = elem.dim == 2 ? 3 : 6;
            for (int m = 0; m < nmodes; ++m) {
                const Eigen::VectorXd mode = rigid_modes_col(elem, m);
                CHECK((es.K * mode).norm() <= 1e-9 * knorm * mode.norm());
            }
        }
    }
}

TEST_CASE("interior evaluation point counts per scheme")
{
    const ElementGeometry pent = pentagon();
    const WachspressBasis basis2(pent);
    const Material m2 = Material::plane_stress(1.0, 0.3);
    CHECK(element_stiffness(pent, basis2, m2, Scheme::LS1).interior_points == 5);
    CHECK(element_stiffness(pent, basis2, m2, Scheme::LS3n).interior_points == 15);
    CHECK(element_stiffness(pent, basis2, m2, Scheme::CS).interior_points == 0);

    const ElementGeometry hexa = frustum(); // 6 quad faces -> 24 tets
    const WachspressBasis basis3(hexa);
    const Material m3 = Material::isotropic_3d(1.0, 0.3);
    CHECK(element_stiffness(hexa, basis3, m3, Scheme::LS1).interior_points == 24);
    CHECK(element_stiffness(hexa, basis3, m3, Scheme::LS3n).interior_points == 96);
}

TEST_CASE("on the square all smoothing schemes agree with the dense bilinear form")
{
    // the basis is bilinear here, so boundary and interior quadratures are
    // exact and LS1/LS3n coincide with the dense-quadrature smoothed stiffness
    const ElementGeometry sq = unit_square();
    const WachspressBasis basis(sq);
    const Material mat = Material::plane_stress(30.0, 0.25);

    Eigen::MatrixXd Kdense = Eigen::MatrixXd::Zero(8, 8);
    for (const SmoothingCell& cell : subdivide_to_simplices(sq)) {
        SmoothedBasis sb;
        sb.dim = 2;
        for (int j = 0; j < 2; ++j) sb.d[j] = projected_d(cell, basis, j);
        const ModifiedB mb = modified_b(sb);
        std::span<const Vec3> verts(cell.verts.data(), 3);
        for (const QuadPoint& qp : simplex_rule(verts, 2, 4)) {
            const Vec3 r = qp.x - cell.centroid;
            Eigen::MatrixXd B = mb.B + r.x() * mb.dB[0] + r.y() * mb.dB[1];
            Kdense.noalias() += qp.w * B.transpose() * mat.C * B;
        }
    }

    const Eigen::MatrixXd K1 = element_stiffness(sq, basis, mat, Scheme::LS1).K;
    const Eigen::MatrixXd K3 = element_stiffness(sq, basis, mat, Scheme::LS3n).K;
    CHECK((K1 - Kdense).norm() <= 1e-8 * Kdense.norm());
    CHECK((K1 - K3).norm() <= 1e-8 * Kdense.norm());
}

TEST_CASE("LS1 and LS3n stay close on general convex polygons")
{
    // the two schemes differ only in how the interior term is integrated;
    // the gap is a fixed small fraction per shape
    const ElementGeometry hex = make_polygon({{1, 0, 0},
                                              {0.55, 0.9, 0},
                                              {-0.5, 0.95, 0},
                                              {-1.05, -0.05, 0},
                                              {-0.45, -0.95, 0},
                                              {0.5, -1.0, 0}});
    const WachspressBasis basis(hex);
    const Material mat = Material::plane_stress(1.0, 0.3);
    const Eigen::MatrixXd K1 = element_stiffness(hex, basis, mat, Scheme::LS1).K;
    const Eigen::MatrixXd K3 = element_stiffness(hex, basis, mat, Scheme::LS3n).K;
    CHECK((K1 - K3).norm() <= 2e-2 * K3.norm());
}

TEST_CASE("CS on a triangle equals the exact P1 stiffness")
{
    const ElementGeometry tri = make_polygon({{0.1, 0.05, 0}, {1.3, 0.2, 0}, {0.4, 1.2, 0}});
    const WachspressBasis basis(tri);
    const Material mat = Material::plane_stress(10.0, 0.3);

    const Eigen::MatrixXd g = p1_gradients(tri);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 6);
    for (int I = 0; I < 3; ++I) {
        B(0, 2 * I) = g(I, 0);
        B(1, 2 * I + 1) = g(I, 1);
        B(2, 2 * I) = g(I, 1);
        B(2, 2 * I + 1) = g(I, 0);
    }
    const double area = std::abs(polygon_signed_area(tri.verts));
    const Eigen::MatrixXd Kp1 = area * B.transpose() * mat.C * B;

    const Eigen::MatrixXd Kcs = element_stiffness(tri, basis, mat, Scheme::CS).K;
    CHECK((Kcs - Kp1).norm() <= 1e-12 * Kp1.norm());
    CHECK_THROWS(element_stiffness(frustum(), WachspressBasis(frustum()),
                                   Material::isotropic_3d(1.0, 0.3), Scheme::CS));
}

TEST_CASE("body force vector properties")
{
    const ElementGeometry pent = pentagon();
    const WachspressBasis basis(pent);
    const Vec3 b(1.6, -0.8, 0.0);
    const double area = std::abs(polygon_signed_area(pent.verts));

    SUBCASE("zero field gives a zero vector")
    {
        const Eigen::VectorXd f =
            body_force_vector(pent, basis, [](const Vec3&) { return Vec3::Zero(); }, Scheme::LS1);
        CHECK(f.norm() == 0.0);
    }
    SUBCASE("constant field balances the total force on any element")
    {
        const Eigen::VectorXd f =
            body_force_vector(pent, basis, [&](const Vec3&) { return b; }, Scheme::LS1);
        Vec3 total = Vec3::Zero();
        for (int I = 0; I < 5; ++I) total += Vec3(f[2 * I], f[2 * I + 1], 0.0);
        CHECK((total - area * b).norm() <= 1e-10 * area * b.norm());
    }
    SUBCASE("on the square the Taylor form matches dense quadrature to 1e-9")
    {
        // bilinear basis: the degree-2 Taylor expansion is exact here
        const ElementGeometry sq = unit_square();
        const WachspressBasis bsq(sq);
        const Eigen::VectorXd f =
            body_force_vector(sq, bsq, [&](const Vec3&) { return b; }, Scheme::LS1);
        Eigen::VectorXd fdense = Eigen::VectorXd::Zero(8);
        BasisEval be;
        for (const SmoothingCell& cell : subdivide_to_simplices(sq)) {
            std::span<const Vec3> verts(cell.verts.data(), 3);
            for (const QuadPoint& qp : simplex_rule(verts, 2, 8)) {
                bsq.eval(qp.x, be);
                for (int I = 0; I < 4; ++I)
                    for (int c = 0; c < 2; ++c) fdense[2 * I + c] += qp.w * be.values[I] * b[c];
            }
        }
        CHECK((f - fdense).norm() <= 1e-9 * fdense.norm());
    }
    SUBCASE("on a pentagon the Taylor form is a close but inexact quadrature")
    {
        const Eigen::VectorXd f =
            body_force_vector(pent, basis, [&](const Vec3&) { return b; }, Scheme::LS1);
        Eigen::VectorXd fdense = Eigen::VectorXd::Zero(10);
        BasisEval be;
        for (const SmoothingCell& cell : subdivide_to_simplices(pent)) {
            std::span<const Vec3> verts(cell.verts.data(), 3);
            for (const QuadPoint& qp : simplex_rule(verts, 2, 10)) {
                basis.eval(qp.x, be);
                for (int I = 0; I < 5; ++I)
                    for (int c = 0; c < 2; ++c) fdense[2 * I + c] += qp.w * be.values[I] * b[c];
            }
        }
        CHECK((f - fdense).norm() <= 1e-2 * fdense.norm());
    }
}

TEST_CASE("integrate_function is exact for monomials of degree <= 2")
{
    std::mt19937_64 rng(59);
    std::vector<ElementGeometry> shapes2 = {unit_square(), pentagon(),
                                            testing::random_convex_polygon(rng, 6)};
    struct Mono {
        std::function<double(const Vec3&)> f;
        Mat3 hess;
    };
    auto mono = [](int a, int b, int c) {
        Mono m;
        m.f = [=](const Vec3& x) {
            return std::pow(x.x(), a) * std::pow(x.y(), b) * std::pow(x.z(), c);
        };
        m.hess = Mat3::Zero();
        if (a == 2) m.hess(0, 0) = 2;
        if (b == 2) m.hess(1, 1) = 2;
        if (c == 2) m.hess(2, 2) = 2;
        if (a == 1 && b == 1) m.hess(0, 1) = m.hess(1, 0) = 1;
        if (b == 1 && c == 1) m.hess(1, 2) = m.hess(2, 1) = 1;
        if (a == 1 && c == 1) m.hess(0, 2) = m.hess(2, 0) = 1;
        return m;
    };

    for (const auto& elem : shapes2) {
        for (const auto& [a, b] : std::vector<std::pair<int, int>>{
                 {0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}}) {
            const Mono m = mono(a, b, 0);
            const IntegrationResult r = integrate_function(elem, m.f, [&](const Vec3&) {
                return m.hess;
            });
            double oracle = 0.0;
            for (const SmoothingCell& cell : subdivide_to_simplices(elem)) {
                std::span<const Vec3> verts(cell.verts.data(), 3);
                for (const QuadPoint& qp : simplex_rule(verts, 2, 4)) oracle += qp.w * m.f(qp.x);
            }
            CHECK(std::abs(r.value - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
        }
    }

    // one interior point per subcell
    const IntegrationResult count = integrate_function(pentagon(), [](const Vec3&) { return 1.0; },
                                                       [](const Vec3&) { return Mat3::Zero(); });
    CHECK(count.interior_points == 5);
    CHECK(count.value == doctest::Approx(std::abs(polygon_signed_area(pentagon().verts))));
}

TEST_CASE("integrate_function handles 3D quadratics and FD fallback")
{
    const ElementGeometry hexa = frustum();
    auto f = [](const Vec3& x) {
        return x.x() * x.x() + x.y() * x.y() + x.x() * x.y() + x.z() * x.z();
    };
    Mat3 H;
    H << 2, 1, 0, 1, 2, 0, 0, 0, 2;

    double oracle = 0.0;
    for (const SmoothingCell& cell : subdivide_to_simplices(hexa)) {
        std::span<const Vec3> verts(cell.verts.data(), 4);
        for (const QuadPoint& qp : simplex_rule(verts, 3, 4)) oracle += qp.w * f(qp.x);
    }
    const IntegrationResult exact = integrate_function(hexa, f, [&](const Vec3&) { return H; });
    CHECK(std::abs(exact.value - oracle) <= 1e-9 * std::abs(oracle));

    // FD Hessian fallback is accuracy-limited but close
    const IntegrationResult fd = integrate_function(hexa, f);
    CHECK(std::abs(fd.value - oracle) <= 1e-6 * std::abs(oracle));
}
