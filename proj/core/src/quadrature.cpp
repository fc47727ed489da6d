#include "polyls/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace polyls {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1,1].
void gauss_jacobi_m11(int n, double alpha, double beta, std::vector<double>& nodes,
                      std::vector<double>& weights)
{
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        J(k, k) = den != 0.0 ? (beta * beta - alpha * alpha) / den : 0.0;
        if (k >= 1) {
            const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
            const double d = (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) *
                             (2.0 * k + ab - 1.0);
            const double b = std::sqrt(num / d);
            J(k, k - 1) = b;
            J(k - 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // mu0 = integral of the weight over [-1,1]
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) *
                       std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        weights[i] = mu0 * v * v;
    }
}

int points_for_degree(int degree) { return degree / 2 + 1; }

} // namespace

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    gauss_jacobi_m11(n, 0.0, 0.0, nodes, weights);
    for (int i = 0; i < n; ++i) {
        nodes[i] = 0.5 * (nodes[i] + 1.0);
        weights[i] *= 0.5;
    }
}

void gauss_jacobi_01(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights)
{
    gauss_jacobi_m11(n, static_cast<double>(alpha), 0.0, nodes, weights);
    // t = (x+1)/2 maps the weight (1-x)^alpha to 2^alpha (1-t)^alpha
    const double scale = std::pow(2.0, -static_cast<double>(alpha) - 1.0);
    for (int i = 0; i < n; ++i) {
        nodes[i] = 0.5 * (nodes[i] + 1.0);
        weights[i] *= scale;
    }
}

QuadRule segment_rule(const Vec3& a, const Vec3& b, int n)
{
    std::vector<double> t, w;
    gauss_legendre_01(n, t, w);
    const double len = (b - a).norm();
    QuadRule rule(n);
    for (int i = 0; i < n; ++i) {
        rule[i].x = a + t[i] * (b - a);
        rule[i].w = w[i] * len;
    }
    return rule;
}

QuadRule triangle_rule(const Vec3& v0, const Vec3& v1, const Vec3& v2, int degree)
{
    const int n = points_for_degree(degree);
    std::vector<double> s, ws, e, we;
    gauss_legendre_01(n, s, ws);
    gauss_jacobi_01(n, 1, e, we);

    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    // reference weights integrate to 1/2; physical jacobian is 2*area
    double area = 0.5 * e1.cross(e2).norm();
    if (e1.z() == 0.0 && e2.z() == 0.0) area = std::abs(0.5 * cross2(e1, e2));
    const double jac = 2.0 * area;

    QuadRule rule;
    rule.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double eta = e[j];
            const double xi = s[i] * (1.0 - eta);
            rule.push_back({v0 + xi * e1 + eta * e2, ws[i] * we[j] * jac});
        }
    }
    return rule;
}

QuadRule tetrahedron_rule(const Vec3& v0, const Vec3& v1, const Vec3& v2, const Vec3& v3,
                          int degree)
{
    const int n = points_for_degree(degree);
    std::vector<double> u, wu, v, wv, w, ww;
    gauss_legendre_01(n, u, wu);
    gauss_jacobi_01(n, 1, v, wv);
    gauss_jacobi_01(n, 2, w, ww);

    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 e3 = v3 - v0;
    const double jac = std::abs(e1.cross(e2).dot(e3)); // = 6*volume

    QuadRule rule;
    rule.reserve(static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double zeta = w[k];
                const double eta = v[j] * (1.0 - zeta);
                const double xi = u[i] * (1.0 - v[j]) * (1.0 - zeta);
                rule.push_back({v0 + xi * e1 + eta * e2 + zeta * e3, wu[i] * wv[j] * ww[k] * jac});
            }
        }
    }
    return rule;
}

QuadRule simplex_rule(std::span<const Vec3> verts, int dim, int degree)
{
    if (dim == 2) return triangle_rule(verts[0], verts[1], verts[2], degree);
    return tetrahedron_rule(verts[0], verts[1], verts[2], verts[3], degree);
}

QuadRule triangle_rule_interior3(const Vec3& v0, const Vec3& v1, const Vec3& v2)
{
    double area = 0.5 * (v1 - v0).cross(v2 - v0).norm();
    if (v0.z() == 0.0 && v1.z() == 0.0 && v2.z() == 0.0)
        area = std::abs(0.5 * cross2(v1 - v0, v2 - v0));
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    QuadRule rule(3);
    rule[0] = {a * v0 + b * v1 + b * v2, area / 3.0};
    rule[1] = {b * v0 + a * v1 + b * v2, area / 3.0};
    rule[2] = {b * v0 + b * v1 + a * v2, area / 3.0};
    return rule;
}

QuadRule tetrahedron_rule_interior4(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                    const Vec3& v3)
{
    const double vol = std::abs((v1 - v0).cross(v2 - v0).dot(v3 - v0)) / 6.0;
    const double a = 0.5854101966249685;
    const double b = 0.1381966011250105;
    const Vec3 vs[4] = {v0, v1, v2, v3};
    QuadRule rule(4);
    for (int i = 0; i < 4; ++i) {
        Vec3 p = Vec3::Zero();
        for (int j = 0; j < 4; ++j) p += (i == j ? a : b) * vs[j];
        rule[i] = {p, vol / 4.0};
    }
    return rule;
}

QuadRule facet_triangle_rule3(const Vec3& v0, const Vec3& v1, const Vec3& v2)
{
    const double area = 0.5 * (v1 - v0).cross(v2 - v0).norm();
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    QuadRule rule(3);
    rule[0] = {a * v0 + b * v1 + b * v2, area / 3.0};
    rule[1] = {b * v0 + a * v1 + b * v2, area / 3.0};
    rule[2] = {b * v0 + b * v1 + a * v2, area / 3.0};
    return rule;
}

} // namespace polyls
