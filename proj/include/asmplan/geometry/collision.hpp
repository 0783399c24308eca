#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "asmplan/geometry/mesh.hpp"

namespace asmplan {

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    bool empty() const { return (lo.array() > hi.array()).any(); }
    /// Overlap test with both boxes grown by `margin`.
    bool overlaps(const Aabb& b, double margin = 0.0) const {
        return (lo.array() <= b.hi.array() + margin).all() &&
               (b.lo.array() <= hi.array() + margin).all();
    }
    bool contains(const Vec3& p, double margin = 0.0) const {
        return (p.array() >= lo.array() - margin).all() &&
               (p.array() <= hi.array() + margin).all();
    }
};

/// Static AABB tree over a triangle soup. Leaves hold up to kLeafSize triangles.
class Bvh {
public:
    static constexpr int kLeafSize = 4;

    struct Node {
        Aabb box;
        std::uint32_t first = 0;  // leaf: offset into order(); inner: left child
        std::uint32_t count = 0;  // leaf: triangle count; inner: 0
        std::uint32_t right = 0;  // inner: right child
        bool leaf() const { return count > 0; }
    };

    Bvh() = default;
    Bvh(const std::vector<Vec3>& vertices, const std::vector<Triangle>& triangles);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& order() const { return order_; }
    bool empty() const { return nodes_.empty(); }
    const Aabb& bounds() const { return nodes_.front().box; }

private:
    std::uint32_t build(const std::vector<Aabb>& boxes, const std::vector<Vec3>& centers,
                        std::uint32_t begin, std::uint32_t end);

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
};

/// A posed triangle soup prepared for proximity queries: world-space vertices
/// plus a BVH. Immutable; safe to share across threads.
class CollisionModel {
public:
    CollisionModel() = default;
    CollisionModel(std::vector<Vec3> vertices, std::vector<Triangle> triangles);
    explicit CollisionModel(const Mesh& mesh, const Pose& pose = Pose::identity());

    /// Solid shrunk by moving every face `delta` inward (per-vertex least
    /// squares over the distinct adjacent face planes), placed at `pose`.
    static CollisionModel shrunk(const Mesh& mesh, double delta, const Pose& pose = Pose::identity());
    /// Oriented box with half extents `half` centred at pose.translation().
    static CollisionModel box(const Pose& pose, const Vec3& half);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Bvh& bvh() const { return bvh_; }
    const Aabb& bounds() const { return bvh_.bounds(); }
    std::array<Vec3, 3> triangle(std::size_t i) const {
        const auto& t = triangles_[i];
        return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
    }

    /// Same soup translated by `offset` (BVH rebuilt).
    CollisionModel translated(const Vec3& offset) const;

    /// Generalised winding number test; only meaningful away from the surface.
    bool contains(const Vec3& p) const;

    /// One vertex index per connected component of the soup.
    const std::vector<std::uint32_t>& component_seeds() const { return seeds_; }

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<std::uint32_t> seeds_;
    Bvh bvh_;
};

/// Moves each vertex so that every adjacent face plane shifts `delta` inward.
std::vector<Vec3> offset_vertices_inward(const Mesh& mesh, double delta);

/// Euclidean distance between two triangles (0 when they intersect).
double triangle_distance(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b);
double point_triangle_distance(const Vec3& p, const std::array<Vec3, 3>& t, Vec3* closest = nullptr);
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
bool segment_intersects_triangle(const Vec3& p0, const Vec3& p1, const std::array<Vec3, 3>& t);

/// True iff some triangle of `a` comes within `clearance` of some triangle of
/// `b`, or one solid contains a vertex of the other. BVH-accelerated.
bool meshes_intersect(const CollisionModel& a, const CollisionModel& b, double clearance);
bool meshes_intersect(const Mesh& a, const Pose& pa, const Mesh& b, const Pose& pb, double clearance);

/// Reference implementation: every triangle pair, no acceleration.
bool meshes_intersect_brute_force(const CollisionModel& a, const CollisionModel& b, double clearance);

/// Calls `visit(ia, ib)` for every triangle pair whose boxes overlap within
/// `margin`. Returning false from `visit` stops the traversal.
void for_each_near_pair(const CollisionModel& a, const CollisionModel& b, double margin,
                        const std::function<bool(std::uint32_t, std::uint32_t)>& visit);

/// Contact-tolerant collision: the solids overlap by more than `contact_tol`.
/// Surfaces that merely touch (within the tolerance) do not collide.
bool collides(const Mesh& a, const Pose& pa, const CollisionModel& b, double contact_tol);

/// First hit of the ray origin + t*dir (t > t_min) with the soup, or a negative
/// value when nothing is hit. `tri` receives the triangle index.
double raycast(const CollisionModel& model, const Vec3& origin, const Vec3& dir, double t_min,
               std::uint32_t* tri = nullptr);

/// Penetration estimate for a colliding pair: the smallest translation along
/// 26 lattice directions (bisection) that separates `a` from `b` under the
/// contact tolerance, plus that tolerance. Returns 0 when they do not collide.
double estimate_penetration_depth(const Mesh& a, const Pose& pa, const Mesh& b, const Pose& pb,
                                  double contact_tol);

}  // namespace asmplan
