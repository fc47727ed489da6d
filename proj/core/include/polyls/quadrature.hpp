#pragma once

#include "polyls/geometry.hpp"

#include <span>
#include <vector>

namespace polyls {

struct QuadPoint {
    Vec3 x;
    double w;
};

using QuadRule = std::vector<QuadPoint>;

// Gauss-Legendre nodes/weights on [0,1], exact for polynomials of degree 2n-1.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Gauss-Jacobi nodes/weights for the weight (1-t)^alpha on [0,1].
void gauss_jacobi_01(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

// n-point Gauss rule along the segment [a,b]; weights sum to |b-a|.
QuadRule segment_rule(const Vec3& a, const Vec3& b, int n);

// Conical-product rules over physical simplices, exact for total degree <= `degree`.
QuadRule triangle_rule(const Vec3& v0, const Vec3& v1, const Vec3& v2, int degree);
QuadRule tetrahedron_rule(const Vec3& v0, const Vec3& v1, const Vec3& v2, const Vec3& v3,
                          int degree);
QuadRule simplex_rule(std::span<const Vec3> verts, int dim, int degree);

// Symmetric interior rules used by the smoothing schemes: strictly interior
// points, exact for total degree 2.
QuadRule triangle_rule_interior3(const Vec3& v0, const Vec3& v1, const Vec3& v2);
QuadRule tetrahedron_rule_interior4(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                    const Vec3& v3);

// Degree-2 rule over a triangular facet embedded in 3D (the 2/3,1/6,1/6 family).
QuadRule facet_triangle_rule3(const Vec3& v0, const Vec3& v1, const Vec3& v2);

} // namespace polyls
