#include "polyls/wachspress.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace polyls {

namespace {

constexpr double kInsideRel = 1e-12;  // strict-interior threshold for eval()
constexpr double kOutsideRel = 1e-10; // values() tolerance for roundoff on the boundary

[[noreturn]] void fail(int element, const std::string& msg)
{
    std::ostringstream os;
    os << "wachspress";
    if (element >= 0) os << " (element " << element << ")";
    os << ": " << msg;
    throw std::runtime_error(os.str());
}

} // namespace

WachspressBasis::WachspressBasis(const ElementGeometry& elem)
{
    dim_ = elem.dim;
    element_index_ = elem.index;
    verts_ = elem.verts;
    diam_ = elem.diameter();
    if (diam_ <= 0.0) fail(element_index_, "degenerate element");
    if (dim_ == 2)
        build_2d(elem);
    else
        build_3d(elem);
    convex_ = is_convex(elem);
    if (!convex_) {
        if (!is_star_convex(elem, elem.vertex_mean()))
            fail(element_index_, "element is neither convex nor star-convex about its vertex mean");
        std::cerr << "wachspress: warning: element " << element_index_
                  << " is star-convex but not convex; weights may change sign\n";
    }
}

void WachspressBasis::build_2d(const ElementGeometry& elem)
{
    const int n = elem.n_vertices();
    if (n < 3) fail(element_index_, "polygon needs at least 3 vertices");
    facets_.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec3& a = elem.verts[i];
        const Vec3& b = elem.verts[(i + 1) % n];
        const Vec3 e = b - a;
        const double len = std::hypot(e.x(), e.y());
        if (len <= 1e-12 * diam_) fail(element_index_, "degenerate edge " + std::to_string(i));
        facets_[i].n = Vec3(e.y() / len, -e.x() / len, 0.0);
        facets_[i].offset = facets_[i].n.dot(a);
    }
    incident_.resize(n);
    corner_det_.resize(n);
    for (int i = 0; i < n; ++i) {
        const int prev = (i + n - 1) % n;
        incident_[i] = {prev, i, -1};
        corner_det_[i] = cross2(facets_[prev].n, facets_[i].n);
        if (std::abs(corner_det_[i]) <= 1e-12)
            fail(element_index_, "collinear vertex " + std::to_string(i));
    }
}

void WachspressBasis::build_3d(const ElementGeometry& elem)
{
    const int n = elem.n_vertices();
    const int nf = static_cast<int>(elem.faces.size());
    if (nf < 4) fail(element_index_, "polyhedron needs at least 4 faces");
    facets_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& face = elem.faces[f];
        Vec3 nrm = Vec3::Zero();
        const std::size_t m = face.size();
        for (std::size_t i = 0; i < m; ++i)
            nrm += elem.verts[face[i]].cross(elem.verts[face[(i + 1) % m]]);
        const double len = nrm.norm();
        if (len <= 0.0) fail(element_index_, "zero-area face " + std::to_string(f));
        facets_[f].n = nrm / len;
        facets_[f].offset = facets_[f].n.dot(elem.verts[face[0]]);
        // planarity: every face vertex must sit on the plane of the first one
        for (int id : face)
            if (std::abs(facets_[f].offset - facets_[f].n.dot(elem.verts[id])) > 1e-10 * diam_)
                fail(element_index_, "face " + std::to_string(f) + " is not planar");
    }

    incident_.assign(n, {-1, -1, -1});
    std::vector<int> count(n, 0);
    for (int f = 0; f < nf; ++f)
        for (int id : elem.faces[f]) {
            if (count[id] >= 3)
                fail(element_index_, "vertex " + std::to_string(id) +
                                         " has more than 3 incident faces; perturb the vertex "
                                         "or merge coplanar faces");
            incident_[id][count[id]++] = f;
        }
    for (int v = 0; v < n; ++v)
        if (count[v] != 3)
            fail(element_index_, "vertex " + std::to_string(v) + " has " +
                                     std::to_string(count[v]) +
                                     " incident faces (exactly 3 required); perturb the vertex "
                                     "or merge coplanar faces");

    corner_det_.resize(n);
    for (int v = 0; v < n; ++v) {
        Mat3 m;
        m.col(0) = facets_[incident_[v][0]].n;
        m.col(1) = facets_[incident_[v][1]].n;
        m.col(2) = facets_[incident_[v][2]].n;
        double det = m.determinant();
        // reorder to the counter-clockwise-from-outside convention, which makes
        // the determinant positive on a convex polyhedron
        if (det < 0.0) {
            std::swap(incident_[v][1], incident_[v][2]);
            det = -det;
        }
        if (det <= 1e-12)
            fail(element_index_, "degenerate vertex " + std::to_string(v) +
                                     " (face normals nearly coplanar)");
        corner_det_[v] = det;
    }
}

void WachspressBasis::facet_distances(const Vec3& x, Eigen::ArrayXd& g) const
{
    const int nf = static_cast<int>(facets_.size());
    g.resize(nf);
    for (int f = 0; f < nf; ++f) g[f] = (facets_[f].offset - facets_[f].n.dot(x)) / diam_;
}

void WachspressBasis::values(const Vec3& x, Eigen::VectorXd& out) const
{
    Eigen::ArrayXd g;
    facet_distances(x, g);
    if (g.minCoeff() < -kOutsideRel) fail(element_index_, "query point lies outside the element");

    const int n = size();
    const int nf = static_cast<int>(facets_.size());
    out.resize(n);
    double sum = 0.0;
    for (int v = 0; v < n; ++v) {
        double w = corner_det_[v];
        const auto& inc = incident_[v];
        for (int f = 0; f < nf; ++f) {
            if (f == inc[0] || f == inc[1] || f == inc[2]) continue;
            w *= g[f];
        }
        out[v] = w;
        sum += w;
    }
    if (std::abs(sum) < 1e-300) fail(element_index_, "weights sum to zero at query point");
    out /= sum;
}

Eigen::VectorXd WachspressBasis::values(const Vec3& x) const
{
    Eigen::VectorXd out;
    values(x, out);
    return out;
}

void WachspressBasis::eval(const Vec3& x, BasisEval& out) const
{
    Eigen::ArrayXd g;
    facet_distances(x, g);
    if (g.minCoeff() <= kInsideRel)
        fail(element_index_, "eval requires a strictly interior point (h_f > 1e-12*diameter)");

    const int n = size();
    const int nf = static_cast<int>(facets_.size());

    // log-derivative sums over all facets; per vertex, subtract its incident ones
    std::vector<Vec3> r(nf);
    std::vector<Mat3> rr(nf);
    Vec3 r_tot = Vec3::Zero();
    Mat3 rr_tot = Mat3::Zero();
    for (int f = 0; f < nf; ++f) {
        r[f] = -facets_[f].n / (diam_ * g[f]);
        rr[f] = r[f] * r[f].transpose();
        r_tot += r[f];
        rr_tot += rr[f];
    }

    Eigen::VectorXd w(n);
    Eigen::MatrixXd grad_w(n, 3);
    std::vector<Mat3> hess_w(n);
    double w_sum = 0.0;
    Vec3 gw_sum = Vec3::Zero();
    Mat3 hw_sum = Mat3::Zero();

    for (int v = 0; v < n; ++v) {
        const auto& inc = incident_[v];
        double wv = corner_det_[v];
        Vec3 rv = r_tot;
        Mat3 sv = rr_tot;
        for (int f = 0; f < nf; ++f) {
            if (f == inc[0] || f == inc[1] || f == inc[2]) continue;
            wv *= g[f];
        }
        for (int k = 0; k < 3; ++k) {
            if (inc[k] < 0) continue;
            rv -= r[inc[k]];
            sv -= rr[inc[k]];
        }
        w[v] = wv;
        grad_w.row(v) = (wv * rv).transpose();
        hess_w[v] = wv * (rv * rv.transpose() - sv);
        w_sum += wv;
        gw_sum += wv * rv;
        hw_sum += hess_w[v];
    }
    if (std::abs(w_sum) < 1e-300) fail(element_index_, "weights sum to zero at query point");

    out.values.resize(n);
    out.gradients.resize(n, 3);
    out.hessians.resize(n, 6);
    for (int v = 0; v < n; ++v) {
        const double phi = w[v] / w_sum;
        const Vec3 gphi = (grad_w.row(v).transpose() - phi * gw_sum) / w_sum;
        const Mat3 hphi = (hess_w[v] - phi * hw_sum - gphi * gw_sum.transpose() -
                           gw_sum * gphi.transpose()) /
                          w_sum;
        out.values[v] = phi;
        out.gradients.row(v) = gphi.transpose();
        out.hessians(v, HXX) = hphi(0, 0);
        out.hessians(v, HYY) = hphi(1, 1);
        out.hessians(v, HZZ) = hphi(2, 2);
        out.hessians(v, HXY) = hphi(0, 1);
        out.hessians(v, HYZ) = hphi(1, 2);
        out.hessians(v, HXZ) = hphi(0, 2);
    }
}

BasisEval WachspressBasis::eval(const Vec3& x) const
{
    BasisEval out;
    eval(x, out);
    return out;
}

} // namespace polyls
