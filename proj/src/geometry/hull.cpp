#include "asmplan/geometry/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "asmplan/geometry/collision.hpp"

namespace asmplan {
namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double point_segment_distance_2d(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

double point_segment_distance_3d(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

// Distance from p to the boundary of a CCW convex polygon, and whether p is inside.
std::pair<double, bool> polygon_boundary_distance(const std::vector<Vec2>& poly, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    bool inside = true;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        best = std::min(best, point_segment_distance_2d(p, a, b));
        if (cross2(a, b, p) < 0.0) inside = false;
    }
    return {best, inside};
}

}  // namespace

std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
    const Vec3 n = normal.normalized();
    // Axis least aligned with n, lowest index on ties.
    int axis = 0;
    for (int k = 1; k < 3; ++k) {
        if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
    }
    const Vec3 u = n.cross(Vec3::Unit(axis)).normalized();
    const Vec3 v = n.cross(u);
    return {u, v};
}

Vec3 Hull3D::centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& v : vertices) c += v;
    return vertices.empty() ? c : Vec3(c / static_cast<double>(vertices.size()));
}

Hull2D convex_hull(std::span<const Vec2> points, double tol) {
    Hull2D hull;
    const std::size_t n = points.size();
    if (n == 0) return hull;

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
        return points[a].y() < points[b].y();
    });

    // Affine rank.
    const Vec2& p0 = points[idx.front()];
    std::size_t far = idx.front();
    for (auto i : idx) {
        if ((points[i] - p0).norm() > (points[far] - p0).norm()) far = i;
    }
    if ((points[far] - p0).norm() <= tol) {
        hull.rank = 0;
        hull.vertices = {p0};
        hull.source_index = {idx.front()};
        return hull;
    }
    const Vec2 dir = (points[far] - p0).normalized();
    double max_off = 0.0;
    for (auto i : idx) max_off = std::max(max_off, std::abs(cross2(p0, p0 + dir, points[i])));
    if (max_off <= tol) {
        std::size_t lo = idx.front(), hi = idx.front();
        for (auto i : idx) {
            const double s = (points[i] - p0).dot(dir);
            if (s < (points[lo] - p0).dot(dir)) lo = i;
            if (s > (points[hi] - p0).dot(dir)) hi = i;
        }
        hull.rank = 1;
        hull.vertices = {points[lo], points[hi]};
        hull.source_index = {lo, hi};
        return hull;
    }

    // Andrew's monotone chain; near-collinear points (within tol of the chord) dropped.
    std::vector<std::size_t> chain(2 * n);
    std::size_t k = 0;
    auto keep_turn = [&](std::size_t o, std::size_t a, std::size_t b) {
        const double len = (points[b] - points[o]).norm();
        return cross2(points[o], points[a], points[b]) > tol * len;
    };
    for (auto i : idx) {
        while (k >= 2 && !keep_turn(chain[k - 2], chain[k - 1], i)) --k;
        chain[k++] = i;
    }
    for (std::size_t t = n - 1, lower = k + 1; t-- > 0;) {
        const auto i = idx[t];
        while (k >= lower && !keep_turn(chain[k - 2], chain[k - 1], i)) --k;
        chain[k++] = i;
    }
    chain.resize(k - 1);

    // Start at the lowest-y vertex, largest x on ties.
    std::size_t start = 0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const Vec2& c = points[chain[i]];
        const Vec2& s = points[chain[start]];
        if (c.y() < s.y() - tol || (std::abs(c.y() - s.y()) <= tol && c.x() > s.x())) start = i;
    }
    std::rotate(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(start), chain.end());

    hull.rank = 2;
    for (auto i : chain) {
        hull.vertices.push_back(points[i]);
        hull.source_index.push_back(i);
    }
    return hull;
}

Hull3D convex_hull(std::span<const Vec3> points, double tol) {
    Hull3D hull;
    const std::size_t n = points.size();
    if (n == 0) return hull;

    std::size_t i0 = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const auto& a = points[i];
        const auto& b = points[i0];
        if (a.x() < b.x() || (a.x() == b.x() && (a.y() < b.y() || (a.y() == b.y() && a.z() < b.z())))) i0 = i;
    }
    std::size_t i1 = i0;
    for (std::size_t i = 0; i < n; ++i) {
        if ((points[i] - points[i0]).norm() > (points[i1] - points[i0]).norm()) i1 = i;
    }
    if ((points[i1] - points[i0]).norm() <= tol) {
        hull.rank = 0;
        hull.vertices = {points[i0]};
        hull.source_index = {i0};
        return hull;
    }
    const Vec3 dir = (points[i1] - points[i0]).normalized();
    auto line_dist = [&](std::size_t i) {
        const Vec3 d = points[i] - points[i0];
        return (d - d.dot(dir) * dir).norm();
    };
    std::size_t i2 = i0;
    for (std::size_t i = 0; i < n; ++i) {
        if (line_dist(i) > line_dist(i2)) i2 = i;
    }
    if (line_dist(i2) <= tol) {
        std::size_t lo = i0, hi = i0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = (points[i] - points[i0]).dot(dir);
            if (s < (points[lo] - points[i0]).dot(dir)) lo = i;
            if (s > (points[hi] - points[i0]).dot(dir)) hi = i;
        }
        hull.rank = 1;
        hull.vertices = {points[lo], points[hi]};
        hull.source_index = {lo, hi};
        return hull;
    }
    const Vec3 pn = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
    auto plane_dist = [&](std::size_t i) { return (points[i] - points[i0]).dot(pn); };
    std::size_t i3 = i0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(plane_dist(i)) > std::abs(plane_dist(i3))) i3 = i;
    }
    if (std::abs(plane_dist(i3)) <= tol) {
        const auto [u, v] = plane_basis(pn);
        std::vector<Vec2> flat;
        flat.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 d = points[i] - points[i0];
            flat.emplace_back(d.dot(u), d.dot(v));
        }
        const Hull2D h2 = convex_hull(std::span<const Vec2>(flat), tol);
        hull.rank = 2;
        hull.plane_normal = u.cross(v);
        for (auto s : h2.source_index) {
            hull.vertices.push_back(points[s]);
            hull.source_index.push_back(s);
        }
        return hull;
    }

    struct Face {
        std::array<std::size_t, 3> v;
        Vec3 n;
        double d;
        bool alive = true;
    };
    std::vector<Face> faces;
    const Vec3 inner = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    auto make_face = [&](std::size_t a, std::size_t b, std::size_t c) {
        Vec3 nrm = (points[b] - points[a]).cross(points[c] - points[a]);
        const double len = nrm.norm();
        nrm = len > 0.0 ? Vec3(nrm / len) : Vec3::Zero();
        Face f{{a, b, c}, nrm, nrm.dot(points[a])};
        if (f.n.dot(inner) - f.d > 0.0) {
            std::swap(f.v[1], f.v[2]);
            f.n = -f.n;
            f.d = -f.d;
        }
        return f;
    };
    faces.push_back(make_face(i0, i1, i2));
    faces.push_back(make_face(i0, i1, i3));
    faces.push_back(make_face(i0, i2, i3));
    faces.push_back(make_face(i1, i2, i3));

    for (std::size_t p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<std::size_t> visible;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (faces[f].alive && faces[f].n.dot(points[p]) - faces[f].d > tol) visible.push_back(f);
        }
        if (visible.empty()) continue;
        std::set<std::pair<std::size_t, std::size_t>> edges;
        for (auto f : visible) {
            for (int k = 0; k < 3; ++k) edges.emplace(faces[f].v[k], faces[f].v[(k + 1) % 3]);
        }
        std::vector<std::pair<std::size_t, std::size_t>> horizon;
        for (const auto& e : edges) {
            if (!edges.contains({e.second, e.first})) horizon.push_back(e);
        }
        for (auto f : visible) faces[f].alive = false;
        for (const auto& [a, b] : horizon) {
            Vec3 nrm = (points[b] - points[a]).cross(points[p] - points[a]);
            const double len = nrm.norm();
            nrm = len > 0.0 ? Vec3(nrm / len) : Vec3::Zero();
            faces.push_back(Face{{a, b, p}, nrm, nrm.dot(points[a])});
        }
    }

    std::map<std::size_t, std::size_t> remap;
    for (const auto& f : faces) {
        if (!f.alive) continue;
        for (auto v : f.v) remap.emplace(v, 0);
    }
    for (auto& [src, dst] : remap) {
        dst = hull.vertices.size();
        hull.vertices.push_back(points[src]);
        hull.source_index.push_back(src);
    }
    hull.rank = 3;
    const Vec3 c = hull.centroid();
    for (const auto& f : faces) {
        if (!f.alive) continue;
        std::array<std::size_t, 3> tri{remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]};
        Vec3 nrm = f.n;
        if (nrm.dot(c) - nrm.dot(points[f.v[0]]) > 0.0) {
            std::swap(tri[1], tri[2]);
            nrm = -nrm;
        }
        hull.faces.push_back(tri);
        hull.normals.push_back(nrm);
    }
    return hull;
}

double signed_distance(const Hull2D& hull, const Vec2& p) {
    if (hull.vertices.empty()) return -std::numeric_limits<double>::infinity();
    if (hull.rank == 0) return -(p - hull.vertices[0]).norm();
    if (hull.rank == 1) return -point_segment_distance_2d(p, hull.vertices[0], hull.vertices[1]);
    const auto [dist, inside] = polygon_boundary_distance(hull.vertices, p);
    return inside ? dist : -dist;
}

double signed_distance(const Hull3D& hull, const Vec3& p) {
    if (hull.vertices.empty()) return -std::numeric_limits<double>::infinity();
    switch (hull.rank) {
        case 0:
            return -(p - hull.vertices[0]).norm();
        case 1:
            return -point_segment_distance_3d(p, hull.vertices[0], hull.vertices[1]);
        case 2: {
            const auto [u, v] = plane_basis(hull.plane_normal);
            const Vec3& o = hull.vertices[0];
            std::vector<Vec2> flat;
            for (const auto& q : hull.vertices) flat.emplace_back((q - o).dot(u), (q - o).dot(v));
            const Vec2 pp((p - o).dot(u), (p - o).dot(v));
            const double off = (p - o).dot(hull.plane_normal);
            const auto [d2, inside] = polygon_boundary_distance(flat, pp);
            return -(inside ? std::abs(off) : std::hypot(off, d2));
        }
        default:
            break;
    }
    double max_plane = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < hull.faces.size(); ++f) {
        max_plane = std::max(max_plane, hull.normals[f].dot(p - hull.vertices[hull.faces[f][0]]));
    }
    if (max_plane <= 0.0) return -max_plane;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : hull.faces) {
        best = std::min(best, point_triangle_distance(p, {hull.vertices[f[0]], hull.vertices[f[1]], hull.vertices[f[2]]}));
    }
    return -best;
}

HullSide point_vs_hull(const Hull2D& hull, const Vec2& p, double tol) {
    const double sd = signed_distance(hull, p);
    if (std::abs(sd) <= tol) return HullSide::boundary;
    return sd > 0.0 ? HullSide::inside : HullSide::outside;
}

HullSide point_vs_hull(const Hull3D& hull, const Vec3& p, double tol) {
    const double sd = signed_distance(hull, p);
    if (std::abs(sd) <= tol) return HullSide::boundary;
    return sd > 0.0 ? HullSide::inside : HullSide::outside;
}

}  // namespace asmplan
