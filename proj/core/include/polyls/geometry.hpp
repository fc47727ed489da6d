#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace polyls {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Points are stored as Vector3d in both 2D and 3D; planar meshes keep z = 0.

inline double cross2(const Vec3& a, const Vec3& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double diameter(std::span<const Vec3> pts)
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d2 = std::max(d2, (pts[i] - pts[j]).squaredNorm());
    return std::sqrt(d2);
}

inline Vec3 vertex_mean(std::span<const Vec3> pts)
{
    Vec3 m = Vec3::Zero();
    for (const Vec3& p : pts) m += p;
    return m / static_cast<double>(pts.size());
}

// Signed area of a planar polygon given as a CCW loop (z ignored).
inline double polygon_signed_area(std::span<const Vec3> loop)
{
    double a = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec3& p = loop[i];
        const Vec3& q = loop[(i + 1) % loop.size()];
        a += cross2(p, q);
    }
    return 0.5 * a;
}

// Signed measure of a d-simplex with d+1 vertices (triangle in the plane,
// tetrahedron in space).
inline double simplex_signed_measure(std::span<const Vec3> v, int dim)
{
    if (dim == 2) return 0.5 * cross2(v[1] - v[0], v[2] - v[0]);
    return (v[1] - v[0]).cross(v[2] - v[0]).dot(v[3] - v[0]) / 6.0;
}

// Unit normal of the plane through three points, following the right-hand rule.
inline Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c)
{
    Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

} // namespace polyls
