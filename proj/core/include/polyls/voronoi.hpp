#pragma once

#include "polyls/mesh.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace polyls {

// Axis-aligned box, or an L-shaped region: the box with the far corner octant
// across the mirrored axes removed. The notch corner sits at the box midpoint
// on every mirrored axis, which lets the generator tile the arms with mirror
// images of the corner-box seeds so that no cell straddles a mirror plane.
struct Domain {
    int dim = 2;
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Ones();
    std::array<bool, 3> mirror = {false, false, false};

    bool lshape() const { return mirror[0] || mirror[1] || mirror[2]; }
    Vec3 mid() const { return 0.5 * (lo + hi); }
    double measure() const;

    static Domain box_2d(const Vec3& lo, const Vec3& hi);
    static Domain box_3d(const Vec3& lo, const Vec3& hi);
    static Domain lshape_2d(const Vec3& lo, const Vec3& hi);
    // prism with an L-shaped footprint (notch through the z range)
    static Domain lshape_prism(const Vec3& lo, const Vec3& hi);
    // box with the far corner octant removed in all three axes
    static Domain lshape_corner_3d(const Vec3& lo, const Vec3& hi);
};

struct CvtResult {
    PolytopeMesh mesh;
    std::vector<Vec3> seeds;               // final seed positions (all copies)
    std::vector<double> energy_per_sweep;  // CVT energy before each sweep and after the last
};

// Clipped Voronoi mesh of explicit seeds after `lloyd_iterations` relaxation
// sweeps. For L-shaped domains the seeds are the corner-box subset; their
// mirror images are managed internally.
CvtResult generate_voronoi_mesh(const Domain& domain, std::vector<Vec3> seeds,
                                int lloyd_iterations);

// Deterministic centroidal-Voronoi mesh: n_seeds total cells (rounded to a
// multiple of the mirror-copy count on L-shaped domains), seeded from rng_seed.
PolytopeMesh generate_cvt_mesh(const Domain& domain, int n_seeds, int lloyd_iterations,
                               std::uint64_t rng_seed);

CvtResult generate_cvt_mesh_info(const Domain& domain, int n_seeds, int lloyd_iterations,
                                 std::uint64_t rng_seed);

} // namespace polyls
