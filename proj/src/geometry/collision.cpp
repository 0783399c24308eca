#include "asmplan/geometry/collision.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace asmplan {
namespace {

Aabb triangle_box(const std::array<Vec3, 3>& t) {
    Aabb b;
    for (const auto& v : t) b.extend(v);
    return b;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

std::vector<std::uint32_t> component_seeds_of(std::size_t nv, const std::vector<Triangle>& tris) {
    std::vector<std::uint32_t> parent(nv);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : tris) {
        parent[find(t[1])] = find(t[0]);
        parent[find(t[2])] = find(t[0]);
    }
    std::vector<std::uint32_t> seeds;
    std::vector<bool> seen(nv, false);
    for (const auto& t : tris) {
        const auto r = find(t[0]);
        if (!seen[r]) {
            seen[r] = true;
            seeds.push_back(t[0]);
        }
    }
    return seeds;
}

bool contains_any_seed(const CollisionModel& solid, const CollisionModel& other) {
    for (auto s : other.component_seeds()) {
        const Vec3& p = other.vertices()[s];
        if (solid.bounds().contains(p) && solid.contains(p)) return true;
    }
    return false;
}

}  // namespace

Bvh::Bvh(const std::vector<Vec3>& vertices, const std::vector<Triangle>& triangles) {
    const auto n = static_cast<std::uint32_t>(triangles.size());
    if (n == 0) return;
    std::vector<Aabb> boxes(n);
    std::vector<Vec3> centers(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto& t = triangles[i];
        boxes[i] = triangle_box({vertices[t[0]], vertices[t[1]], vertices[t[2]]});
        centers[i] = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * n);
    build(boxes, centers, 0, n);
}

std::uint32_t Bvh::build(const std::vector<Aabb>& boxes, const std::vector<Vec3>& centers,
                         std::uint32_t begin, std::uint32_t end) {
    const auto idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, cbox;
    for (auto i = begin; i < end; ++i) {
        box.extend(boxes[order_[i]]);
        cbox.extend(centers[order_[i]]);
    }
    if (end - begin <= static_cast<std::uint32_t>(kLeafSize)) {
        nodes_[idx] = Node{box, begin, end - begin, 0};
        return idx;
    }
    int axis = 0;
    const Vec3 ext = cbox.hi - cbox.lo;
    if (ext.y() > ext[axis]) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (centers[a][axis] != centers[b][axis]) return centers[a][axis] < centers[b][axis];
                         return a < b;
                     });
    const auto left = build(boxes, centers, begin, mid);
    const auto right = build(boxes, centers, mid, end);
    nodes_[idx] = Node{box, left, 0, right};
    return idx;
}

CollisionModel::CollisionModel(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    seeds_ = component_seeds_of(vertices_.size(), triangles_);
    bvh_ = Bvh(vertices_, triangles_);
}

CollisionModel::CollisionModel(const Mesh& mesh, const Pose& pose) {
    vertices_.reserve(mesh.vertex_count());
    for (const auto& v : mesh.vertices()) vertices_.push_back(pose.apply(v));
    triangles_ = mesh.triangles();
    seeds_ = component_seeds_of(vertices_.size(), triangles_);
    bvh_ = Bvh(vertices_, triangles_);
}

CollisionModel CollisionModel::shrunk(const Mesh& mesh, double delta, const Pose& pose) {
    auto verts = offset_vertices_inward(mesh, delta);
    for (auto& v : verts) v = pose.apply(v);
    return CollisionModel(std::move(verts), mesh.triangles());
}

CollisionModel CollisionModel::box(const Pose& pose, const Vec3& half) {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i) {
        const Vec3 local((i & 1) ? half.x() : -half.x(), (i & 2) ? half.y() : -half.y(),
                         (i & 4) ? half.z() : -half.z());
        v.push_back(pose.apply(local));
    }
    std::vector<Triangle> t = {
        {0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
        {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5},
    };
    return CollisionModel(std::move(v), std::move(t));
}

CollisionModel CollisionModel::translated(const Vec3& offset) const {
    auto v = vertices_;
    for (auto& p : v) p += offset;
    return CollisionModel(std::move(v), triangles_);
}

bool CollisionModel::contains(const Vec3& p) const {
    double omega = 0.0;
    for (const auto& t : triangles_) {
        const Vec3 a = vertices_[t[0]] - p;
        const Vec3 b = vertices_[t[1]] - p;
        const Vec3 c = vertices_[t[2]] - p;
        const double la = a.norm(), lb = b.norm(), lc = c.norm();
        const double num = a.dot(b.cross(c));
        const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
        omega += 2.0 * std::atan2(num, den);
    }
    return omega / (4.0 * std::numbers::pi) > 0.5;
}

std::vector<Vec3> offset_vertices_inward(const Mesh& mesh, double delta) {
    const auto& verts = mesh.vertices();
    std::vector<std::vector<Vec3>> normals(verts.size());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Vec3 n = mesh.face_normal(t);
        for (auto vi : mesh.triangles()[t]) {
            auto& list = normals[vi];
            const bool dup = std::any_of(list.begin(), list.end(),
                                         [&](const Vec3& m) { return m.dot(n) > 1.0 - 1e-9; });
            if (!dup) list.push_back(n);
        }
    }
    std::vector<Vec3> out(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto& list = normals[i];
        if (list.empty()) {
            out[i] = verts[i];
            continue;
        }
        Eigen::MatrixXd n(static_cast<Eigen::Index>(list.size()), 3);
        for (std::size_t k = 0; k < list.size(); ++k) n.row(static_cast<Eigen::Index>(k)) = list[k].transpose();
        const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n.rows(), -delta);
        const Vec3 shift = n.completeOrthogonalDecomposition().solve(rhs);
        out[i] = verts[i] + shift;
    }
    return out;
}

double point_triangle_distance(const Vec3& p, const std::array<Vec3, 3>& t, Vec3* closest) {
    const Vec3 q = closest_point_on_triangle(p, t[0], t[1], t[2]);
    if (closest) *closest = q;
    return (p - q).norm();
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    constexpr double eps = 1e-18;
    const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a <= eps && e <= eps) return r.norm();
    if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p0 + d1 * s) - (q0 + d2 * t)).norm();
}

bool segment_intersects_triangle(const Vec3& p0, const Vec3& p1, const std::array<Vec3, 3>& t) {
    const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]);
    const double d0 = n.dot(p0 - t[0]);
    const double d1 = n.dot(p1 - t[0]);
    if ((d0 > 0.0 && d1 > 0.0) || (d0 < 0.0 && d1 < 0.0)) return false;
    // Coplanar segments are left to the distance tests.
    if (d0 == d1) return false;
    const Vec3 x = p0 + (d0 / (d0 - d1)) * (p1 - p0);
    for (int k = 0; k < 3; ++k) {
        const Vec3& a = t[k];
        const Vec3& b = t[(k + 1) % 3];
        if (n.dot((b - a).cross(x - a)) < 0.0) return false;
    }
    return true;
}

double triangle_distance(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
    for (int k = 0; k < 3; ++k) {
        if (segment_intersects_triangle(a[k], a[(k + 1) % 3], b)) return 0.0;
        if (segment_intersects_triangle(b[k], b[(k + 1) % 3], a)) return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        best = std::min(best, point_triangle_distance(a[k], b));
        best = std::min(best, point_triangle_distance(b[k], a));
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            best = std::min(best, segment_segment_distance(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]));
        }
    }
    return best;
}

void for_each_near_pair(const CollisionModel& a, const CollisionModel& b, double margin,
                        const std::function<bool(std::uint32_t, std::uint32_t)>& visit) {
    if (a.bvh().empty() || b.bvh().empty()) return;
    const auto& na = a.bvh().nodes();
    const auto& nb = b.bvh().nodes();
    const auto& oa = a.bvh().order();
    const auto& ob = b.bvh().order();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        const auto& x = na[i];
        const auto& y = nb[j];
        if (!x.box.overlaps(y.box, margin)) continue;
        if (x.leaf() && y.leaf()) {
            for (auto ia = x.first; ia < x.first + x.count; ++ia) {
                const Aabb ba = triangle_box(a.triangle(oa[ia]));
                for (auto ib = y.first; ib < y.first + y.count; ++ib) {
                    if (!ba.overlaps(triangle_box(b.triangle(ob[ib])), margin)) continue;
                    if (!visit(oa[ia], ob[ib])) return;
                }
            }
        } else if (y.leaf() ||
                   (!x.leaf() && (x.box.hi - x.box.lo).squaredNorm() >= (y.box.hi - y.box.lo).squaredNorm())) {
            stack.emplace_back(x.right, j);
            stack.emplace_back(x.first, j);
        } else {
            stack.emplace_back(i, y.right);
            stack.emplace_back(i, y.first);
        }
    }
}

bool meshes_intersect(const CollisionModel& a, const CollisionModel& b, double clearance) {
    if (a.bvh().empty() || b.bvh().empty()) return false;
    if (!a.bounds().overlaps(b.bounds(), clearance)) return false;
    bool hit = false;
    for_each_near_pair(a, b, clearance, [&](std::uint32_t ia, std::uint32_t ib) {
        if (triangle_distance(a.triangle(ia), b.triangle(ib)) <= clearance) hit = true;
        return !hit;
    });
    return hit || contains_any_seed(a, b) || contains_any_seed(b, a);
}

bool meshes_intersect(const Mesh& a, const Pose& pa, const Mesh& b, const Pose& pb, double clearance) {
    return meshes_intersect(CollisionModel(a, pa), CollisionModel(b, pb), clearance);
}

bool meshes_intersect_brute_force(const CollisionModel& a, const CollisionModel& b, double clearance) {
    for (std::size_t i = 0; i < a.triangles().size(); ++i) {
        for (std::size_t j = 0; j < b.triangles().size(); ++j) {
            if (triangle_distance(a.triangle(i), b.triangle(j)) <= clearance) return true;
        }
    }
    if (a.triangles().empty() || b.triangles().empty()) return false;
    return contains_any_seed(a, b) || contains_any_seed(b, a);
}

bool collides(const Mesh& a, const Pose& pa, const CollisionModel& b, double contact_tol) {
    return meshes_intersect(CollisionModel::shrunk(a, contact_tol, pa), b, 0.0);
}

double raycast(const CollisionModel& model, const Vec3& origin, const Vec3& dir, double t_min,
               std::uint32_t* tri) {
    if (model.bvh().empty()) return -1.0;
    const auto& nodes = model.bvh().nodes();
    const auto& order = model.bvh().order();
    const Vec3 inv(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_tri = 0;
    auto slab = [&](const Aabb& box) {
        double t0 = t_min, t1 = best;
        for (int k = 0; k < 3; ++k) {
            double ta = (box.lo[k] - origin[k]) * inv[k];
            double tb = (box.hi[k] - origin[k]) * inv[k];
            if (std::isnan(ta) || std::isnan(tb)) {
                if (origin[k] < box.lo[k] || origin[k] > box.hi[k]) return false;
                continue;
            }
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return false;
        }
        return true;
    };
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const auto& node = nodes[stack.back()];
        stack.pop_back();
        if (!slab(node.box)) continue;
        if (!node.leaf()) {
            stack.push_back(node.right);
            stack.push_back(node.first);
            continue;
        }
        for (auto k = node.first; k < node.first + node.count; ++k) {
            const auto t = model.triangle(order[k]);
            const Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
            const Vec3 pv = dir.cross(e2);
            const double det = e1.dot(pv);
            if (std::abs(det) < 1e-14) continue;
            const double inv_det = 1.0 / det;
            const Vec3 tv = origin - t[0];
            const double u = tv.dot(pv) * inv_det;
            if (u < 0.0 || u > 1.0) continue;
            const Vec3 qv = tv.cross(e1);
            const double v = dir.dot(qv) * inv_det;
            if (v < 0.0 || u + v > 1.0) continue;
            const double hit = e2.dot(qv) * inv_det;
            if (hit > t_min && hit < best) {
                best = hit;
                best_tri = order[k];
            }
        }
    }
    if (!std::isfinite(best)) return -1.0;
    if (tri) *tri = best_tri;
    return best;
}

double estimate_penetration_depth(const Mesh& a, const Pose& pa, const Mesh& b, const Pose& pb,
                                  double contact_tol) {
    const CollisionModel mb(b, pb);
    const CollisionModel sa = CollisionModel::shrunk(a, contact_tol, pa);
    if (!meshes_intersect(sa, mb, 0.0)) return 0.0;
    const double reach = (sa.bounds().hi - sa.bounds().lo).norm() + (mb.bounds().hi - mb.bounds().lo).norm();
    double best = reach;
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dz = -1; dz <= 1; ++dz) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const Vec3 d = Vec3(dx, dy, dz).normalized();
                double lo = 0.0, hi = std::min(best, reach);
                if (meshes_intersect(sa.translated(d * hi), mb, 0.0)) continue;
                for (int it = 0; it < 40; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (meshes_intersect(sa.translated(d * mid), mb, 0.0) ? lo : hi) = mid;
                }
                best = std::min(best, hi);
            }
        }
    }
    return best + contact_tol;
}

}  // namespace asmplan
