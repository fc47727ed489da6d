#include "polyls/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace polyls {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("voronoi: " + msg); }

struct Poly2 {
    std::vector<Vec3> loop; // CCW
};

struct Poly3 {
    std::vector<Vec3> V;
    std::vector<std::vector<int>> F; // outward loops
};

Poly2 box_poly2(const Vec3& lo, const Vec3& hi)
{
    Poly2 p;
    p.loop = {{lo.x(), lo.y(), 0.0}, {hi.x(), lo.y(), 0.0}, {hi.x(), hi.y(), 0.0},
              {lo.x(), hi.y(), 0.0}};
    return p;
}

Poly3 box_poly3(const Vec3& lo, const Vec3& hi)
{
    Poly3 p;
    p.V.resize(8);
    for (int i = 0; i < 8; ++i)
        p.V[i] = Vec3(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
    p.F = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
    return p;
}

// keep n.x <= c
bool clip2(Poly2& p, const Vec3& n, double c, double eps)
{
    const std::size_t m = p.loop.size();
    if (m == 0) return false;
    std::vector<double> d(m);
    double dmin = 1e300, dmax = -1e300;
    for (std::size_t i = 0; i < m; ++i) {
        d[i] = n.dot(p.loop[i]) - c;
        dmin = std::min(dmin, d[i]);
        dmax = std::max(dmax, d[i]);
    }
    if (dmax <= eps) return true;
    if (dmin >= -eps) {
        p.loop.clear();
        return false;
    }
    std::vector<Vec3> out;
    out.reserve(m + 2);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = (i + 1) % m;
        if (d[i] <= eps) out.push_back(p.loop[i]);
        const bool cross = (d[i] < -eps && d[j] > eps) || (d[i] > eps && d[j] < -eps);
        if (cross) {
            const double t = d[i] / (d[i] - d[j]);
            out.push_back(p.loop[i] + t * (p.loop[j] - p.loop[i]));
        }
    }
    p.loop = std::move(out);
    return p.loop.size() >= 3;
}

// keep n.x <= c; builds the cap face from the cut chords
bool clip3(Poly3& p, const Vec3& n, double c, double eps)
{
    const std::size_t nv = p.V.size();
    if (nv == 0) return false;
    std::vector<double> d(nv);
    double dmin = 1e300, dmax = -1e300;
    for (std::size_t i = 0; i < nv; ++i) {
        d[i] = n.dot(p.V[i]) - c;
        dmin = std::min(dmin, d[i]);
        dmax = std::max(dmax, d[i]);
    }
    if (dmax <= eps) return true;
    if (dmin >= -eps) {
        p = Poly3{};
        return false;
    }

    std::map<std::pair<int, int>, int> cut;
    auto cut_vertex = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = cut.find(key);
        if (it != cut.end()) return it->second;
        const double t = d[a] / (d[a] - d[b]);
        const int id = static_cast<int>(p.V.size());
        p.V.push_back(p.V[a] + t * (p.V[b] - p.V[a]));
        d.push_back(0.0);
        cut.emplace(key, id);
        return id;
    };
    auto on_plane = [&](int v) { return std::abs(d[v]) <= eps; };

    std::vector<std::vector<int>> newF;
    std::vector<std::pair<int, int>> chords;
    for (const auto& face : p.F) {
        const std::size_t m = face.size();
        std::vector<int> nl;
        nl.reserve(m + 2);
        for (std::size_t i = 0; i < m; ++i) {
            const int a = face[i];
            const int b = face[(i + 1) % m];
            if (d[a] <= eps) nl.push_back(a);
            if ((d[a] < -eps && d[b] > eps) || (d[a] > eps && d[b] < -eps))
                nl.push_back(cut_vertex(a, b));
        }
        // drop consecutive duplicates (with wrap-around)
        std::vector<int> clean;
        for (int id : nl)
            if (clean.empty() || clean.back() != id) clean.push_back(id);
        while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
        if (clean.size() < 3) continue;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            const int a = clean[i];
            const int b = clean[(i + 1) % clean.size()];
            if (on_plane(a) && on_plane(b)) chords.emplace_back(a, b);
        }
        newF.push_back(std::move(clean));
    }
    if (newF.empty()) {
        p = Poly3{};
        return false;
    }

    // assemble the cap face from the chords
    if (chords.size() < 3) {
        int nin = 0, non = 0, nout = 0;
        for (double v : d) (v > eps ? nout : (v < -eps ? nin : non))++;
        std::ostringstream os;
        os << "degenerate cut (cap with " << chords.size() << " edges; " << nin << " in, " << non
           << " on, " << nout << " out, dmax " << dmax << ", eps " << eps << ")";
        fail(os.str());
    }
    std::unordered_map<int, std::array<int, 2>> adj;
    for (const auto& [a, b] : chords) {
        for (int v : {a, b}) {
            auto [it, inserted] = adj.try_emplace(v, std::array<int, 2>{-1, -1});
            (void)inserted;
            auto& slots = it->second;
            const int other = v == a ? b : a;
            if (slots[0] < 0)
                slots[0] = other;
            else if (slots[1] < 0)
                slots[1] = other;
            else
                fail("degenerate cut (cap vertex with more than two chords)");
        }
    }
    std::vector<int> cap;
    cap.reserve(chords.size());
    const int start = chords.front().first;
    int prev = -1, cur = start;
    do {
        cap.push_back(cur);
        const auto it = adj.find(cur);
        if (it == adj.end() || it->second[1] < 0) fail("degenerate cut (open cap chain)");
        const int nxt = it->second[0] == prev ? it->second[1] : it->second[0];
        prev = cur;
        cur = nxt;
    } while (cur != start && cap.size() <= chords.size());
    if (cur != start || cap.size() < 3) fail("degenerate cut (cap chain did not close)");

    Vec3 newell = Vec3::Zero();
    for (std::size_t i = 0; i < cap.size(); ++i)
        newell += p.V[cap[i]].cross(p.V[cap[(i + 1) % cap.size()]]);
    if (newell.dot(n) < 0.0) std::reverse(cap.begin(), cap.end());
    newF.push_back(std::move(cap));

    // compact away dropped vertices; stale entries would poison the
    // inside/outside classification of later clips
    std::vector<int> remap(p.V.size(), -1);
    std::vector<Vec3> kept;
    for (auto& face : newF)
        for (int& id : face) {
            if (remap[id] < 0) {
                remap[id] = static_cast<int>(kept.size());
                kept.push_back(p.V[id]);
            }
            id = remap[id];
        }
    p.V = std::move(kept);
    p.F = std::move(newF);
    return true;
}

ElementGeometry poly_geometry(const Poly2& p) { return make_polygon(p.loop); }

ElementGeometry poly_geometry(const Poly3& p)
{
    // compact to the used vertices
    std::vector<int> remap(p.V.size(), -1);
    std::vector<Vec3> verts;
    std::vector<std::vector<int>> faces;
    for (const auto& face : p.F) {
        std::vector<int> lf;
        lf.reserve(face.size());
        for (int id : face) {
            if (remap[id] < 0) {
                remap[id] = static_cast<int>(verts.size());
                verts.push_back(p.V[id]);
            }
            lf.push_back(remap[id]);
        }
        faces.push_back(std::move(lf));
    }
    return make_polyhedron(std::move(verts), std::move(faces));
}

struct DomainLayout {
    int copies = 1;
    std::vector<std::array<bool, 3>> flips; // per copy, which axes are mirrored
};

DomainLayout layout_of(const Domain& dom)
{
    DomainLayout lay;
    int k = 0;
    std::array<int, 3> axes{-1, -1, -1};
    for (int a = 0; a < dom.dim; ++a)
        if (dom.mirror[a]) axes[k++] = a;
    const int full = (1 << k) - 1;
    lay.flips.clear();
    for (int mask = 0; mask <= full; ++mask) {
        if (k > 0 && mask == full) continue; // the notch octant carries no seeds
        std::array<bool, 3> f{false, false, false};
        for (int b = 0; b < k; ++b)
            if (mask & (1 << b)) f[axes[b]] = true;
        lay.flips.push_back(f);
    }
    lay.copies = static_cast<int>(lay.flips.size());
    return lay;
}

Vec3 apply_flip(const Domain& dom, const Vec3& x, const std::array<bool, 3>& flip)
{
    Vec3 y = x;
    const Vec3 m = dom.mid();
    for (int a = 0; a < 3; ++a)
        if (flip[a]) y[a] = 2.0 * m[a] - x[a];
    return y;
}

// clip box of one copy: the full box on free axes, the seed-side half on
// mirrored axes
void copy_box(const Domain& dom, const std::array<bool, 3>& flip, Vec3& lo, Vec3& hi)
{
    lo = dom.lo;
    hi = dom.hi;
    const Vec3 m = dom.mid();
    for (int a = 0; a < dom.dim; ++a) {
        if (!dom.mirror[a]) continue;
        if (flip[a])
            lo[a] = m[a];
        else
            hi[a] = m[a];
    }
}

struct SeedSet {
    std::vector<Vec3> all;                    // all copies, copy-major order
    std::vector<std::array<bool, 3>> flip_of; // per seed
    int base_count = 0;
};

SeedSet expand_seeds(const Domain& dom, const std::vector<Vec3>& base)
{
    const DomainLayout lay = layout_of(dom);
    SeedSet s;
    s.base_count = static_cast<int>(base.size());
    for (const auto& flip : lay.flips)
        for (const Vec3& b : base) {
            s.all.push_back(apply_flip(dom, b, flip));
            s.flip_of.push_back(flip);
        }
    return s;
}

template <class Poly, class ClipFn>
Poly clipped_cell(const SeedSet& seeds, int i, Poly start, ClipFn&& clip, double eps)
{
    const Vec3 s = seeds.all[i];
    const int n = static_cast<int>(seeds.all.size());
    std::vector<std::pair<double, int>> order;
    order.reserve(n - 1);
    for (int j = 0; j < n; ++j)
        if (j != i) order.emplace_back((seeds.all[j] - s).squaredNorm(), j);
    std::sort(order.begin(), order.end());

    Poly cell = std::move(start);
    auto max_radius = [&]() {
        double r2 = 0.0;
        if constexpr (std::is_same_v<Poly, Poly2>) {
            for (const Vec3& v : cell.loop) r2 = std::max(r2, (v - s).squaredNorm());
        } else {
            for (const Vec3& v : cell.V) r2 = std::max(r2, (v - s).squaredNorm());
        }
        return std::sqrt(r2);
    };

    double radius = max_radius();
    for (const auto& [d2, j] : order) {
        const double dj = std::sqrt(d2);
        if (0.5 * dj > radius * (1.0 + 1e-12)) break;
        const Vec3 diff = seeds.all[j] - s;
        const Vec3 nrm = diff / dj;
        const double c = nrm.dot(0.5 * (s + seeds.all[j]));
        if (!clip(cell, nrm, c, eps))
            fail("cell of seed " + std::to_string(i) + " vanished during clipping");
        radius = max_radius();
    }
    return cell;
}

std::vector<ElementGeometry> compute_cells(const Domain& dom, const SeedSet& seeds)
{
    const double diag = (dom.hi - dom.lo).norm();
    const double eps = 1e-12 * diag;
    std::vector<ElementGeometry> cells(seeds.all.size());
    for (std::size_t i = 0; i < seeds.all.size(); ++i) {
        Vec3 lo, hi;
        copy_box(dom, seeds.flip_of[i], lo, hi);
        if (dom.dim == 2) {
            Poly2 cell = clipped_cell(seeds, static_cast<int>(i), box_poly2(lo, hi),
                                      [](Poly2& p, const Vec3& n, double c, double e) {
                                          return clip2(p, n, c, e);
                                      },
                                      eps);
            if (cell.loop.size() < 3) fail("cell " + std::to_string(i) + " degenerated");
            cells[i] = poly_geometry(cell);
        } else {
            Poly3 cell = clipped_cell(seeds, static_cast<int>(i), box_poly3(lo, hi),
                                      [](Poly3& p, const Vec3& n, double c, double e) {
                                          return clip3(p, n, c, e);
                                      },
                                      eps);
            if (cell.F.size() < 4) fail("cell " + std::to_string(i) + " degenerated");
            cells[i] = poly_geometry(cell);
        }
        cells[i].index = static_cast<int>(i);
    }
    return cells;
}

void check_collisions(const Domain& dom, const SeedSet& seeds)
{
    const double tol = 1e-10 * (dom.hi - dom.lo).norm();
    const int n = static_cast<int>(seeds.all.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((seeds.all[i] - seeds.all[j]).norm() < tol) {
                std::ostringstream os;
                os << "seed collision after relaxation: seeds " << i << " and " << j << " at ("
                   << seeds.all[i].transpose() << ")";
                fail(os.str());
            }
}

// ---- mesh extraction ------------------------------------------------------

struct NodeMerger {
    double q;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets;
    std::vector<Vec3> nodes;

    explicit NodeMerger(double cell) : q(cell) {}

    static std::uint64_t key(long ix, long iy, long iz)
    {
        std::uint64_t h = 1469598103934665603ull;
        for (long v : {ix, iy, iz}) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }

    int insert(const Vec3& x)
    {
        const long ix = std::lround(x.x() / q);
        const long iy = std::lround(x.y() / q);
        const long iz = std::lround(x.z() / q);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy)
                for (long dz = -1; dz <= 1; ++dz) {
                    auto it = buckets.find(key(ix + dx, iy + dy, iz + dz));
                    if (it == buckets.end()) continue;
                    for (int id : it->second)
                        if ((nodes[id] - x).norm() <= q) return id;
                }
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(x);
        buckets[key(ix, iy, iz)].push_back(id);
        return id;
    }
};

void snap_to_domain_planes(const Domain& dom, Vec3& x)
{
    const Vec3 m = dom.mid();
    for (int a = 0; a < dom.dim; ++a) {
        const double extent = dom.hi[a] - dom.lo[a];
        const double tol = 1e-9 * extent;
        if (std::abs(x[a] - dom.lo[a]) < tol) x[a] = dom.lo[a];
        if (std::abs(x[a] - dom.hi[a]) < tol) x[a] = dom.hi[a];
        if (dom.mirror[a] && std::abs(x[a] - m[a]) < tol) x[a] = m[a];
    }
}

std::string facet_tag(const Domain& dom, const std::vector<Vec3>& nodes)
{
    static const char* axis_name[3] = {"x", "y", "z"};
    const Vec3 m = dom.mid();
    for (int a = 0; a < dom.dim; ++a) {
        const double tol = 1e-9 * (dom.hi[a] - dom.lo[a]);
        auto all_on = [&](double plane) {
            for (const Vec3& p : nodes)
                if (std::abs(p[a] - plane) > tol) return false;
            return true;
        };
        if (all_on(dom.lo[a])) return std::string(axis_name[a]) + "min";
        if (all_on(dom.hi[a])) return std::string(axis_name[a]) + "max";
        if (dom.mirror[a] && all_on(m[a])) return std::string("notch_") + axis_name[a];
    }
    return {};
}

PolytopeMesh extract_mesh(const Domain& dom, const std::vector<ElementGeometry>& cells)
{
    const double diag = (dom.hi - dom.lo).norm();
    PolytopeMesh mesh;
    mesh.dim = dom.dim;
    NodeMerger merger(1e-10 * diag);

    for (const ElementGeometry& cell : cells) {
        std::vector<int> ids(cell.verts.size());
        for (std::size_t v = 0; v < cell.verts.size(); ++v) {
            Vec3 x = cell.verts[v];
            snap_to_domain_planes(dom, x);
            ids[v] = merger.insert(x);
        }
        Polytope el;
        if (dom.dim == 2) {
            for (std::size_t v = 0; v < ids.size(); ++v)
                if (el.loop.empty() || el.loop.back() != ids[v]) el.loop.push_back(ids[v]);
            while (el.loop.size() > 1 && el.loop.front() == el.loop.back()) el.loop.pop_back();
            if (el.loop.size() < 3) fail("element degenerated after node merging");
        } else {
            for (const auto& face : cell.faces) {
                std::vector<int> gf;
                for (int lv : face)
                    if (gf.empty() || gf.back() != ids[lv]) gf.push_back(ids[lv]);
                while (gf.size() > 1 && gf.front() == gf.back()) gf.pop_back();
                if (gf.size() >= 3) el.faces.push_back(std::move(gf));
            }
            if (el.faces.size() < 4) fail("element degenerated after node merging");
        }
        mesh.elements.push_back(std::move(el));
    }
    mesh.nodes = merger.nodes;

    // boundary facets: those without a twin, tagged by the domain plane
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> facets;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const int nf = dom.dim == 2 ? static_cast<int>(mesh.elements[e].loop.size())
                                    : static_cast<int>(mesh.elements[e].faces.size());
        for (int f = 0; f < nf; ++f) {
            std::vector<int> key = mesh.facet_nodes(e, f);
            std::sort(key.begin(), key.end());
            facets[key].emplace_back(e, f);
        }
    }
    for (const auto& [key, where] : facets) {
        if (where.size() == 2) continue;
        if (where.size() != 1) fail("facet shared by more than two elements");
        const auto [e, f] = where.front();
        std::vector<Vec3> pts;
        for (int id : mesh.facet_nodes(e, f)) pts.push_back(mesh.nodes[id]);
        const std::string tag = facet_tag(dom, pts);
        if (tag.empty())
            fail("untagged boundary facet on element " + std::to_string(e) +
                 " (mesh does not tile the domain)");
        mesh.boundary.push_back({e, f, tag});
    }

    validate_mesh(mesh, dom.measure());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const ElementGeometry g = extract_element(mesh, e);
        if (!is_star_convex(g, g.vertex_mean()))
            fail("element " + std::to_string(e) + " is not star-convex about its centroid");
    }
    return mesh;
}

double config_energy(const std::vector<ElementGeometry>& cells, const SeedSet& seeds,
                     std::vector<SimplexMoments>& moments)
{
    moments.resize(cells.size());
    double energy = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        moments[i] = polytope_moments(cells[i]);
        const Vec3 r = moments[i].centroid - seeds.all[i];
        energy += moments[i].second.trace() + moments[i].measure * r.squaredNorm();
    }
    return energy;
}

} // namespace

double Domain::measure() const
{
    double box = 1.0;
    int k = 0;
    for (int a = 0; a < dim; ++a) {
        box *= hi[a] - lo[a];
        if (mirror[a]) ++k;
    }
    return box * (1.0 - (k > 0 ? std::pow(0.5, k) : 0.0));
}

Domain Domain::box_2d(const Vec3& lo, const Vec3& hi) { return {2, lo, hi, {false, false, false}}; }
Domain Domain::box_3d(const Vec3& lo, const Vec3& hi) { return {3, lo, hi, {false, false, false}}; }
Domain Domain::lshape_2d(const Vec3& lo, const Vec3& hi) { return {2, lo, hi, {true, true, false}}; }
Domain Domain::lshape_prism(const Vec3& lo, const Vec3& hi) { return {3, lo, hi, {true, true, false}}; }
Domain Domain::lshape_corner_3d(const Vec3& lo, const Vec3& hi) { return {3, lo, hi, {true, true, true}}; }

CvtResult generate_voronoi_mesh(const Domain& domain, std::vector<Vec3> base_seeds,
                                int lloyd_iterations)
{
    if (base_seeds.size() < 1) fail("at least one seed is required");
    if (domain.measure() <= 0.0) fail("domain measure must be positive");

    const DomainLayout lay = layout_of(domain);
    CvtResult result;

    SeedSet seeds = expand_seeds(domain, base_seeds);
    std::vector<SimplexMoments> moments;
    for (int sweep = 0; sweep < lloyd_iterations; ++sweep) {
        auto cells = compute_cells(domain, seeds);
        result.energy_per_sweep.push_back(config_energy(cells, seeds, moments));

        // move each base seed to the measure-weighted mean of its orbit's cell
        // centroids pulled back to the corner box; plain Lloyd when there are
        // no mirror copies
        for (int b = 0; b < seeds.base_count; ++b) {
            Vec3 acc = Vec3::Zero();
            double mass = 0.0;
            for (int c = 0; c < lay.copies; ++c) {
                const int i = c * seeds.base_count + b;
                acc += moments[i].measure * apply_flip(domain, moments[i].centroid, lay.flips[c]);
                mass += moments[i].measure;
            }
            base_seeds[b] = acc / mass;
        }
        seeds = expand_seeds(domain, base_seeds);
    }
    check_collisions(domain, seeds);

    auto cells = compute_cells(domain, seeds);
    result.energy_per_sweep.push_back(config_energy(cells, seeds, moments));
    result.mesh = extract_mesh(domain, cells);
    result.seeds = seeds.all;
    return result;
}

CvtResult generate_cvt_mesh_info(const Domain& domain, int n_seeds, int lloyd_iterations,
                                 std::uint64_t rng_seed)
{
    if (n_seeds < 1) fail("n_seeds must be >= 1");
    const DomainLayout lay = layout_of(domain);
    const int base_n = std::max(1, (n_seeds + lay.copies / 2) / lay.copies);

    Vec3 slo = domain.lo, shi = domain.hi;
    const Vec3 m = domain.mid();
    for (int a = 0; a < domain.dim; ++a)
        if (domain.mirror[a]) shi[a] = m[a];

    for (int attempt = 0; attempt < 4; ++attempt) {
        std::mt19937_64 rng(rng_seed + 0x9e3779b97f4a7c15ull * attempt);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Vec3> base(base_n, Vec3::Zero());
        for (int i = 0; i < base_n; ++i) {
            bool ok = false;
            while (!ok) {
                for (int a = 0; a < domain.dim; ++a) {
                    // keep a margin from the mirror planes so a seed never
                    // collides with its own image
                    const double margin = domain.mirror[a] ? 1e-3 : 1e-6;
                    const double lo = slo[a] + margin * (shi[a] - slo[a]);
                    const double hi = shi[a] - margin * (shi[a] - slo[a]);
                    base[i][a] = lo + (hi - lo) * unit(rng);
                }
                ok = true;
                for (int j = 0; j < i; ++j)
                    if ((base[i] - base[j]).norm() < 1e-6 * (domain.hi - domain.lo).norm())
                        ok = false;
            }
        }
        try {
            return generate_voronoi_mesh(domain, std::move(base), lloyd_iterations);
        } catch (const std::exception&) {
            if (attempt == 3) throw;
        }
    }
    fail("unreachable");
}

PolytopeMesh generate_cvt_mesh(const Domain& domain, int n_seeds, int lloyd_iterations,
                               std::uint64_t rng_seed)
{
    return generate_cvt_mesh_info(domain, n_seeds, lloyd_iterations, rng_seed).mesh;
}

} // namespace polyls
